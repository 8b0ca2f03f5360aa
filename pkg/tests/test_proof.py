from fractions import Fraction

import pytest

from partreg.coloring import Coloring
from partreg.errors import MalformedInputError
from partreg.matrix import evaluate_image
from partreg.proof import (FAILED, OK, ProofParams, RadoFailure, RadoSolution, dense_census,
                           execute_proof, rado_step, subgroup_reduce, sumset_extend,
                           verify_image_witness)
from partreg.sumsets import WindowSet
from partreg.systems import gen_dh_truncation

STEP_NAMES = ["subgroup-reduction", "dense-class-census", "compute-d-m-N", "rado-step",
              "divisibility-check", "sumset-extension", "positivity-check", "final-verification"]


def two_adic_capped(p):
    v = 0
    while p % 2 == 0 and v < 2:
        p //= 2
        v += 1
    return v


class TestSubgroupReduce:
    def test_parity(self):
        red = subgroup_reduce(Coloring.residue(2, 1000))
        assert red.multiplier == 2
        assert red.rounds == ((2, 1),)
        assert red.coloring.used_colors() == [0]
        assert red.coloring.N == 500

    def test_no_reduction_when_classes_meet_every_subgroup(self):
        # colour by the parity of floor(log2 p): each dyadic block is long
        # enough to hold a multiple of every q <= 12
        col = Coloring.from_function(2, 3000, lambda p: (p.bit_length() - 1) % 2)
        red = subgroup_reduce(col)
        assert red.multiplier == 1 and red.rounds == ()
        assert not red.inconclusive

    def test_two_adic_valuation_needs_two_rounds(self):
        col = Coloring.from_function(3, 4000, two_adic_capped)
        red = subgroup_reduce(col)
        assert [q for q, _ in red.rounds] == [2, 2]
        assert red.multiplier == 4
        assert red.coloring.used_colors() == [2]

    def test_small_window_is_inconclusive(self):
        red = subgroup_reduce(Coloring.constant(20), q_max=12)
        assert red.inconclusive
        assert 12 in red.untested


class TestDenseCensus:
    def test_parity(self):
        c = dense_census(Coloring.residue(2, 100), 100)
        assert (c.d, c.m, c.N) == (Fraction(1, 2), 2, 3)

    def test_one_colour(self):
        c = dense_census(Coloring.constant(50))
        assert (c.d, c.m, c.N) == (1, 1, 1)

    def test_three_residues_exact_third(self):
        c = dense_census(Coloring.residue(3, 100), 99)
        assert (c.d, c.m, c.N) == (Fraction(1, 3), 6, 5)

    def test_three_residues_uneven_window(self):
        # on [1..100] two classes have 33 points, so d = 33/100 and N = ceil(200/33) - 1
        c = dense_census(Coloring.residue(3, 100), 100)
        assert (c.d, c.m, c.N) == (Fraction(33, 100), 6, 6)

    def test_threshold_reported(self):
        c = dense_census(Coloring.residue(4, 400))
        assert c.theta == Fraction(1, 8)
        assert c.dense == (0, 1, 2, 3)

    def test_sparse_class_excluded(self):
        col = Coloring.from_function(2, 1000, lambda p: int(p == 500))
        c = dense_census(col)
        assert c.dense == (0,)

    def test_threshold_too_high(self):
        with pytest.raises(MalformedInputError):
            dense_census(Coloring.residue(2, 100), theta=Fraction(3, 4))


class TestRadoStep:
    def test_constant(self):
        res = rado_step(Coloring.constant(1000), [1], 1, 1, 64, [0])
        assert isinstance(res, RadoSolution)
        assert (res.y, res.x[1, 1]) == (1, 1)
        assert res.images([1]) == {"u_1": 1, "v_1_1": 2}

    def test_parity_in_evens(self):
        col = Coloring.residue(2, 2000)
        res = rado_step(col, [1, 2, 3], 3, 2, 64, [0])
        assert isinstance(res, RadoSolution)
        assert res.y % 2 == 0
        values = [res.y] + list(res.images([1, 2, 3]).values())
        assert all(v % 2 == 0 for v in values)

    def test_no_qualifying_progression(self):
        # c and 2c can never both be odd
        res = rado_step(Coloring.residue(2, 1000), [1], 1, 2, 8, [1])
        assert isinstance(res, RadoFailure)
        assert res.reason == "no qualifying progression"
        assert res.largest_tried is None

    def test_window_exhausted(self):
        res = rado_step(Coloring.constant(5), [5, 5, 5], 3, 1, 64, [0])
        assert isinstance(res, RadoFailure)
        assert res.largest_tried is not None


class TestSumsetExtend:
    def test_full_interval(self):
        ext = sumset_extend(WindowSet.full(1, 10 ** 5), 1, 1, [1, 1], range(2, 3))
        assert ext.xt == {(2, 1): 2, (2, 2): 2}
        assert ext.z == {2: 2}
        assert ext.x == {(2, 1): 1, (2, 2): 1}

    def test_evens(self):
        A = WindowSet.residue(0, 2, 1, 1000)
        ext = sumset_extend(A, 2, 2, [1, 1], range(2, 3))
        assert ext.xt == {(2, 1): 4, (2, 2): 4} and ext.z == {2: 4}
        assert all(v % 2 == 0 for v in ext.x.values())

    def test_empty_range(self):
        ext = sumset_extend(WindowSet.full(1, 10), 1, 1, [1], range(2, 2))
        assert ext.xt == {} and ext.failed == ()

    def test_identities(self):
        a = [3, 1, 4, 1, 5]
        y = 6
        ext = sumset_extend(WindowSet.residue(0, 3, 1, 5000), y, 3, a, range(2, 6))
        assert not ext.failed
        for n in range(2, 6):
            assert sum(ext.x[n, i] for i in range(1, n + 1)) == ext.z[n]
            for i in range(1, n + 1):
                assert ext.x[n, i] + a[n - 1] * y == ext.xt[n, i]
                assert ext.xt[n, i] > a[n - 1] * y

    def test_divisibility_precondition(self):
        with pytest.raises(MalformedInputError):
            sumset_extend(WindowSet.full(1, 10), 3, 2, [1], range(1, 2))

    def test_window_too_small(self):
        # A_{>8} = {9, 10}; 10 + 10 - 16 = 4 is not above 8
        ext = sumset_extend(WindowSet.full(1, 10), 4, 1, [2, 2, 2], range(2, 4))
        assert ext.failed == (2, 3)


def independent_check(trace, coloring, a, n_max):
    system = gen_dh_truncation(n_max, a)
    w = trace.witness
    vec = [w.assignment[name] for name in system.variables]
    image = evaluate_image(system.matrix, vec)
    assert image == w.image_values
    assert min(vec) >= 1
    assert all(1 <= v <= coloring.N for v in image)
    assert len({coloring.colors[v - 1] for v in image}) == 1


class TestExecuteProof:
    def test_constant(self):
        col = Coloring.constant(10 ** 4)
        trace = execute_proof(col, [1, 2, 3], 3)
        assert trace.success
        assert [s.name for s in trace.steps] == STEP_NAMES
        independent_check(trace, col, [1, 2, 3], 3)

    def test_parity(self):
        col = Coloring.residue(2, 10 ** 5)
        trace = execute_proof(col, [1, 1, 1, 1], 4)
        assert trace.success
        assert all(v % 2 == 0 for v in trace.witness.image_values)
        independent_check(trace, col, [1, 1, 1, 1], 4)

    def test_small_window_fails_honestly(self):
        trace = execute_proof(Coloring.residue(2, 10), [1, 2, 3, 4, 5], 5)
        assert not trace.success
        assert trace.witness is None
        assert trace.failed_step.name in ("rado-step", "sumset-extension")
        assert trace.failed_step.reason

    def test_two_adic_colouring(self):
        col = Coloring.from_function(3, 20000, two_adic_capped)
        trace = execute_proof(col, [1, 2], 2)
        assert trace.success
        assert trace.step("subgroup-reduction").outputs["multiplier"] == 4
        independent_check(trace, col, [1, 2], 2)

    def test_positivity_and_identities_on_success(self):
        # one colour gives N = 1, so blocks 2..4 come from the sumset extension
        a = [1, 2, 3, 4]
        trace = execute_proof(Coloring.constant(10 ** 4), a, 4)
        assert trace.success
        ext = trace.step("sumset-extension").outputs
        assert len(ext["xt"]) == 2 + 3 + 4
        y = trace.witness.assignment["y"]
        for n in range(2, 5):
            xs = [trace.witness.assignment[f"x_{n}_{i}"] for i in range(1, n + 1)]
            assert sum(xs) == ext["z"][f"z_{n}"]
            for i, xv in enumerate(xs, start=1):
                assert xv + a[n - 1] * y == ext["xt"][f"xt_{n}_{i}"]
                assert ext["xt"][f"xt_{n}_{i}"] > a[n - 1] * y

    def test_deterministic(self):
        col = Coloring.residue(3, 5000)
        one = execute_proof(col, [1, 2, 3, 4], 4).to_json()
        two = execute_proof(col, [1, 2, 3, 4], 4).to_json()
        assert one == two

    def test_text_rendering(self):
        trace = execute_proof(Coloring.constant(100), [1], 1)
        text = trace.to_text()
        assert text.splitlines()[-1] == "SUCCESS"
        assert "rado-step" in text

    def test_coefficient_count(self):
        with pytest.raises(MalformedInputError):
            execute_proof(Coloring.constant(100), [1], 2)


class TestVerifyImageWitness:
    def test_rejects_mixed_colours(self):
        system = gen_dh_truncation(1, [1])
        ok, reason, _ = verify_image_witness(system, {"y": 1, "x_1_1": 1}, Coloring.residue(2, 10))
        assert not ok and "colours" in reason

    def test_rejects_non_positive(self):
        system = gen_dh_truncation(1, [1])
        ok, reason, _ = verify_image_witness(system, {"y": 0, "x_1_1": 1}, Coloring.constant(10))
        assert not ok and "positive" in reason

    def test_rejects_out_of_window(self):
        system = gen_dh_truncation(1, [1])
        ok, reason, _ = verify_image_witness(system, {"y": 6, "x_1_1": 6}, Coloring.constant(10))
        assert not ok and "outside" in reason

    def test_accepts(self):
        system = gen_dh_truncation(1, [1])
        assert verify_image_witness(system, {"y": 2, "x_1_1": 2}, Coloring.residue(2, 10)) == (True, "", 0)


def test_params_json():
    assert ProofParams(theta=Fraction(1, 4)).to_json()["theta"] == "1/4"
    assert OK != FAILED
