"""Command-line entry point: ``partreg <subcommand> ...``.

Every subcommand writes one JSON report (stdout or ``--out``) that echoes
its configuration. Exit status is 0 for a definite answer, 2 for an
inconclusive or budget-limited one and 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import matrix, proof, search, sumsets, systems
from .coloring import Coloring
from .errors import PartregError

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class InputError(PartregError):
    pass


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    # accept a full partreg report, so gen-system output feeds other commands
    if isinstance(doc, dict) and "command" in doc and isinstance(doc.get("result"), dict):
        return doc["result"]
    return doc


def _in(path: str, what: str, parse):
    doc = _load_json(path)
    try:
        return parse(doc)
    except PartregError as exc:
        raise InputError(f"{path}: bad {what}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad {what}: field {exc}") from None


def _coeffs(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise InputError(f"--coeffs must be comma-separated integers, got {text!r}") from None


def _window(args) -> tuple[int, int]:
    if args.out_lo > args.out_hi:
        raise InputError("--out-lo must not exceed --out-hi")
    return args.out_lo, args.out_hi


def cmd_check_columns(args):
    A = _in(args.matrix, "matrix", matrix.SparseIntMatrix.from_json)
    cert = matrix.columns_property(A, args.max_cols)
    result = {"has_columns_property": cert is not None,
              "certificate": None if cert is None else cert.to_json(),
              "verified": None if cert is None else matrix.verify_certificate(A, cert)}
    return EXIT_OK, result


def cmd_gen_system(args):
    kind = args.kind
    if kind == "schur":
        system = systems.schur_system()
    elif kind == "ap3":
        system = systems.ap3_system()
    else:
        if args.nmax is None or args.coeffs is None:
            raise InputError(f"--nmax and --coeffs are required for kind {kind}")
        a = _coeffs(args.coeffs)
        if kind == "dh":
            system = systems.gen_dh_truncation(args.nmax, a, args.schedule)
        elif kind == "bhl":
            system = systems.gen_bhl_kernel(args.nmax, a)
        elif kind == "nearmiss":
            system = systems.gen_nearmiss_kernel(args.nmax, a)
        else:
            system = systems.gen_finite_system(args.nmax, a)
    return EXIT_OK, system.to_json()


def cmd_sumset(args):
    A = _in(args.a, "window set", sumsets.WindowSet.from_json)
    out = _window(args) if args.out_lo is not None else None
    op = args.op
    if op in ("sum", "diff"):
        if not args.b:
            raise InputError(f"--b is required for op {op}")
        B = _in(args.b, "window set", sumsets.WindowSet.from_json)
        res = (sumsets.sumset if op == "sum" else sumsets.diffset)(A, B, out)
    elif op == "iterate":
        res = sumsets.iterate(args.k, A, out)
    elif op == "scale":
        res = sumsets.scale(args.m, A, out)
    else:
        res = sumsets.filter_above(A, args.t)
    return EXIT_OK, {**res.to_json(), "clipped": res.clipped}


def cmd_density(args):
    S = _in(args.set, "window set", sumsets.WindowSet.from_json)
    d = sumsets.window_density(S, args.n)
    return EXIT_OK, {"n": args.n, "density": str(d), "count": S.count_between(1, args.n)}


def cmd_check_lemma(args):
    A = _in(args.set, "window set", sumsets.WindowSet.from_json)
    out = _window(args)
    if args.lemma == "symmetric":
        rep = sumsets.check_symmetric_lemma(A, args.n, out)
    elif args.lemma == "translated":
        rep = sumsets.check_translated_lemma(A, args.n_lo, args.n_hi, out)
    else:
        m = args.m
        if m is None:
            m = sumsets.lcm_bound(sumsets.density_proxy(A))
        rep = sumsets.check_new_lemma(A, args.t, args.n, m, out)
    code = EXIT_INCONCLUSIVE if rep.verdict == sumsets.INCONCLUSIVE else EXIT_OK
    return code, rep.to_json()


def _system(args) -> systems.LinearSystem:
    return _in(args.system, "system", systems.LinearSystem.from_json)


def cmd_forced(args):
    res = search.forced(_system(args), args.colors, args.window, args.var_bound, args.budget, args.threads)
    code = EXIT_INCONCLUSIVE if res.verdict == search.UNKNOWN else EXIT_OK
    return code, res.to_json()


def cmd_min_n(args):
    res = search.min_forcing_N(_system(args), args.colors, args.window, args.var_bound, args.budget, args.threads)
    code = EXIT_INCONCLUSIVE if res.verdict == search.UNKNOWN else EXIT_OK
    return code, res.to_json()


def cmd_export_cnf(args):
    cnf = search.export_cnf(_system(args), args.colors, args.window, args.var_bound)
    text = cnf.to_dimacs()
    result = {"n_vars": cnf.n_vars, "n_clauses": len(cnf.clauses)}
    if args.cnf_out:
        Path(args.cnf_out).write_text(text)
        result["path"] = args.cnf_out
    else:
        result["dimacs"] = text
    return EXIT_OK, result


def cmd_solve(args):
    cnf = search.export_cnf(_system(args), args.colors, args.window, args.var_bound)
    res = search.solve_external(cnf, args.solver, args.timeout)
    return EXIT_OK, {**res.to_json(), "verdict": search.AVOIDABLE if res.satisfiable else search.FORCED}


def cmd_run_proof(args):
    doc = _load_json(args.coloring)
    try:
        coloring = Coloring.from_json(doc, args.window)
    except PartregError as exc:
        raise InputError(f"{args.coloring}: bad colouring: {exc}") from None
    if args.window is not None and coloring.N != args.window:
        raise InputError(f"colouring covers 1..{coloring.N} but --window is {args.window}")
    params = proof.ProofParams(
        theta=None if args.theta is None else Fraction(args.theta),
        l_max=args.lmax, q_max=args.qmax)
    trace = proof.execute_proof(coloring, _coeffs(args.coeffs), args.nmax, params)
    result = trace.to_json()
    result["text"] = trace.to_text()
    return (EXIT_OK if trace.success else EXIT_INCONCLUSIVE), result


COMMANDS = {
    "check-columns": cmd_check_columns,
    "gen-system": cmd_gen_system,
    "sumset": cmd_sumset,
    "density": cmd_density,
    "check-lemma": cmd_check_lemma,
    "forced": cmd_forced,
    "min-n": cmd_min_n,
    "export-cnf": cmd_export_cnf,
    "solve": cmd_solve,
    "run-proof": cmd_run_proof,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="human-readable rendering")
    common.add_argument("--threads", type=int, default=1, help="worker processes for searches")

    parser = argparse.ArgumentParser(prog="partreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-columns", parents=[common], help="decide the columns property")
    p.add_argument("--matrix", required=True)
    p.add_argument("--max-cols", type=int, default=matrix.DEFAULT_MAX_COLS)

    p = sub.add_parser("gen-system", parents=[common], help="generate a truncated system")
    p.add_argument("--kind", required=True, choices=["dh", "bhl", "nearmiss", "finite", "schur", "ap3"])
    p.add_argument("--nmax", type=int)
    p.add_argument("--coeffs")
    p.add_argument("--schedule", default="linear", choices=["linear", "pow2"])

    p = sub.add_parser("sumset", parents=[common], help="window set arithmetic")
    p.add_argument("--op", required=True, choices=["sum", "diff", "iterate", "scale", "filter"])
    p.add_argument("--a", required=True)
    p.add_argument("--b")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--out-lo", type=int)
    p.add_argument("--out-hi", type=int)

    p = sub.add_parser("density", parents=[common], help="window density proxy")
    p.add_argument("--set", required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("check-lemma", parents=[common], help="check a sumset lemma on a window")
    p.add_argument("--lemma", required=True, choices=["symmetric", "translated", "new"])
    p.add_argument("--set", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--n-lo", type=int, default=1)
    p.add_argument("--n-hi", type=int, default=4)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--m", type=int)
    p.add_argument("--out-lo", type=int, required=True)
    p.add_argument("--out-hi", type=int, required=True)

    for name, help_text in (("forced", "is every colouring forced?"),
                            ("min-n", "least forcing window"),
                            ("export-cnf", "DIMACS encoding of avoiding colourings"),
                            ("solve", "run an external SAT solver")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--system", required=True)
        p.add_argument("--colors", type=int, required=True)
        p.add_argument("--window", type=int, required=True,
                       help="N (for min-n: the largest N tried)")
        p.add_argument("--var-bound", type=int)
        p.add_argument("--budget", type=int)
        if name == "export-cnf":
            p.add_argument("--cnf-out")
        if name == "solve":
            p.add_argument("--solver", help=f"solver command; defaults to ${search.SOLVER_ENV}")
            p.add_argument("--timeout", type=float)

    p = sub.add_parser("run-proof", parents=[common], help="run the construction on a colouring")
    p.add_argument("--coloring", required=True)
    p.add_argument("--coeffs", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--theta")
    p.add_argument("--lmax", type=int, default=64)
    p.add_argument("--qmax", type=int, default=12)
    return parser


def _render(report: dict, pretty: bool) -> str:
    if not pretty:
        return json.dumps(report, sort_keys=True)
    result = report.get("result") or {}
    if isinstance(result, dict) and "text" in result:
        return result["text"]
    return json.dumps(report, indent=2, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k not in ("out", "pretty")}
    try:
        code, result = COMMANDS[args.command](args)
        report = {"command": args.command, "config": config, "result": result,
                  "status": "ok" if code == EXIT_OK else "inconclusive"}
    except PartregError as exc:
        code = EXIT_ERROR
        report = {"command": args.command, "config": config, "status": "error",
                  "error": f"{type(exc).__name__}: {exc}"}
    text = _render(report, args.pretty)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
