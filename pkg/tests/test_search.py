import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_forced, brute_has_witness
from partreg.coloring import Coloring
from partreg.errors import SolverError, TooLargeError
from partreg.search import (AVOIDABLE, FORCED, UNKNOWN, export_cnf, forced, min_forcing_N,
                            mono_witness, parse_solver_output, solve_external,
                            witness_point_sets)
from partreg.systems import (ap3_system, gen_dh_truncation, image_system, kernel_system,
                             schur_system)

SCHUR = schur_system()
AP3 = ap3_system()
SCHUR_AVOIDER = Coloring.from_classes([[1, 4], [2, 3]], 4)


class TestMonoWitness:
    def test_constant_colouring(self):
        w = mono_witness(SCHUR, Coloring.constant(4), 4)
        assert w.assignment == {"s": 1, "t": 1}
        assert w.image_values == (1, 1, 2)
        assert w.color == 0

    def test_classic_avoider(self):
        assert mono_witness(SCHUR, SCHUR_AVOIDER, 4) is None
        assert not brute_has_witness(SCHUR, SCHUR_AVOIDER.colors, 4)

    def test_dh_parity(self):
        s = gen_dh_truncation(1, [1])
        w = mono_witness(s, Coloring.residue(2, 10), 10)
        assert w.assignment == {"y": 2, "x_1_1": 2}
        assert sorted(w.image_values) == [2, 2, 4]
        assert all(v % 2 == 0 for v in w.image_values)

    def test_kernel_mode_colours_variables(self):
        s = kernel_system([[1, 1, -1]])
        w = mono_witness(s, Coloring.constant(3), 3)
        assert w.points == (1, 1, 2)
        assert w.image_values == (0,)

    def test_witness_invariants(self):
        col = Coloring.residue(3, 30)
        w = mono_witness(AP3, col, 30)
        assert all(1 <= v <= 30 for v in w.image_values)
        assert len({col(v) for v in w.image_values}) == 1
        assert all(v >= 1 for v in w.assignment.values())

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=9))
    def test_existence_matches_brute_force(self, colors):
        col = Coloring(2, tuple(colors))
        for system in (SCHUR, AP3):
            got = mono_witness(system, col, col.N) is not None
            assert got == brute_has_witness(system, colors, col.N)


class TestForced:
    def test_schur_five(self):
        assert forced(SCHUR, 2, 5).verdict == FORCED
        assert brute_forced(SCHUR, 2, 5)[0]

    def test_schur_four(self):
        res = forced(SCHUR, 2, 4)
        assert res.verdict == AVOIDABLE
        assert res.avoiding_coloring == SCHUR_AVOIDER
        _, avoiders = brute_forced(SCHUR, 2, 4)
        assert set(avoiders) == {(0, 1, 1, 0), (1, 0, 0, 1)}

    def test_ap3(self):
        assert forced(AP3, 2, 9).verdict == FORCED
        res = forced(AP3, 2, 8)
        assert res.verdict == AVOIDABLE
        assert mono_witness(AP3, res.avoiding_coloring, 8) is None

    def test_avoider_is_lex_least_with_point_one_fixed(self):
        res = forced(AP3, 2, 8)
        _, avoiders = brute_forced(AP3, 2, 8)
        assert res.avoiding_coloring.colors == min(a for a in avoiders if a[0] == 0)

    def test_budget_gives_unknown(self):
        res = forced(AP3, 2, 9, budget=5)
        assert res.verdict == UNKNOWN
        assert res.avoiding_coloring is None

    def test_workers_do_not_change_the_answer(self):
        for N in (8, 9):
            one, two = forced(AP3, 2, N), forced(AP3, 2, N, workers=2)
            assert one.verdict == two.verdict
            assert one.avoiding_coloring == two.avoiding_coloring

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=1, max_size=3),
           st.integers(1, 8), st.booleans())
    def test_oracle_equivalence(self, rows, N, kernel):
        system = kernel_system(rows) if kernel else image_system(rows)
        res = forced(system, 2, N, var_bound=min(N, 6))
        expected, avoiders = brute_forced(system, 2, N, var_bound=min(N, 6))
        assert (res.verdict == FORCED) == expected
        if res.verdict == AVOIDABLE:
            assert res.avoiding_coloring.colors in avoiders
            assert mono_witness(system, res.avoiding_coloring, min(N, 6)) is None


class TestMinForcing:
    def test_schur(self):
        assert min_forcing_N(SCHUR, 2, 10).value == 5

    def test_ap3(self):
        assert min_forcing_N(AP3, 2, 12).value == 9

    def test_single_expression(self):
        assert min_forcing_N(image_system([[1]]), 1, 3).value == 1

    def test_not_found(self):
        res = min_forcing_N(SCHUR, 2, 3)
        assert res.value is None and res.verdict == "not-found"

    def test_unknown_propagates(self):
        res = min_forcing_N(AP3, 2, 12, budget=3)
        assert res.verdict == UNKNOWN and res.value is None

    def test_rado_row_with_columns_property(self):
        res = min_forcing_N(kernel_system([[1, 1, -1]]), 2, 20)
        assert res.verdict == "found" and res.value == 5

    def test_rado_row_without_columns_property(self):
        res = forced(kernel_system([[1, 1, -3]]), 4, 20)
        assert res.verdict == AVOIDABLE
        assert mono_witness(kernel_system([[1, 1, -3]]), res.avoiding_coloring, 20) is None


class TestCnf:
    def test_structure(self):
        cnf = export_cnf(SCHUR, 2, 4)
        assert cnf.n_vars == 8
        assert cnf.var(1, 0) == 1 and cnf.var(4, 1) == 8
        edges = witness_point_sets(SCHUR, 4, 4)
        assert len(cnf.clauses) == 4 + 4 + 2 * len(edges)
        text = cnf.to_dimacs()
        assert f"p cnf 8 {len(cnf.clauses)}" in text
        assert text.splitlines()[0].startswith("c ")

    def test_single_colour(self):
        cnf = export_cnf(SCHUR, 1, 3)
        assert all(len(cl) == 1 for cl in cnf.clauses[:3])

    def test_cap(self):
        with pytest.raises(TooLargeError, match="clauses"):
            export_cnf(SCHUR, 2, 30, max_clauses=100)

    def test_decode(self):
        cnf = export_cnf(SCHUR, 2, 4)
        model = [1, -2, -3, 4, -5, 6, 7, -8]
        assert cnf.decode(model).colors == (0, 1, 1, 0)

    def test_decode_rejects_double_colour(self):
        cnf = export_cnf(SCHUR, 2, 2)
        with pytest.raises(SolverError):
            cnf.decode([1, 2, 3, -4])


class TestSolverOutput:
    def test_parse_sat(self):
        assert parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n") == (True, [1, -2, 3])

    def test_parse_unsat(self):
        assert parse_solver_output("s UNSATISFIABLE\n") == (False, None)

    @pytest.mark.parametrize("text", ["", "s UNKNOWN\n", "s SATISFIABLE\n",
                                      "s SATISFIABLE\nv 1 x 0\n"])
    def test_malformed(self, text):
        with pytest.raises(SolverError):
            parse_solver_output(text)

    def test_missing_solver(self, monkeypatch):
        monkeypatch.delenv("PARTREG_SAT_SOLVER", raising=False)
        with pytest.raises(SolverError, match="unset"):
            solve_external(export_cnf(SCHUR, 2, 4))
        with pytest.raises(SolverError, match="not found"):
            solve_external(export_cnf(SCHUR, 2, 4), "/nonexistent/solver")

    def test_lying_solver_is_caught(self, tmp_path):
        fake = tmp_path / "liar.sh"
        fake.write_text("#!/bin/sh\necho 's SATISFIABLE'\necho 'v 1 -2 3 -4 5 -6 7 -8 0'\n")
        fake.chmod(0o755)
        with pytest.raises(SolverError, match="violates"):
            solve_external(export_cnf(SCHUR, 2, 4), str(fake))

    def test_bad_exit_status(self, tmp_path):
        fake = tmp_path / "crash.sh"
        fake.write_text("#!/bin/sh\nexit 3\n")
        fake.chmod(0o755)
        with pytest.raises(SolverError, match="status 3"):
            solve_external(export_cnf(SCHUR, 2, 4), str(fake))


class TestRealSolver:
    def test_schur_four_sat(self, sat_solver):
        res = solve_external(export_cnf(SCHUR, 2, 4), sat_solver)
        assert res.satisfiable
        assert res.coloring.colors in {(0, 1, 1, 0), (1, 0, 0, 1)}

    def test_schur_five_unsat(self, sat_solver):
        assert not solve_external(export_cnf(SCHUR, 2, 5), sat_solver).satisfiable

    def test_env_variable(self, sat_solver, monkeypatch):
        monkeypatch.setenv("PARTREG_SAT_SOLVER", sat_solver)
        assert solve_external(export_cnf(AP3, 2, 8)).satisfiable

    @pytest.mark.parametrize("system, r, N", [(SCHUR, 3, 13), (SCHUR, 3, 14), (AP3, 2, 8),
                                              (AP3, 2, 9), (kernel_system([[1, 2, -1]]), 2, 9)])
    def test_agrees_with_forced(self, sat_solver, system, r, N):
        sat = solve_external(export_cnf(system, r, N), sat_solver).satisfiable
        assert sat == (forced(system, r, N).verdict == AVOIDABLE)
