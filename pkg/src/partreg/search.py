"""Exhaustive search for monochromatic witnesses and forcing windows.

Witnesses are bounded: every variable lies in ``[1..var_bound]`` and every
coloured value in ``[1..N]``. Image-mode systems colour the row values and
kernel-mode systems colour the variables.

All outputs are canonical. A witness is the lexicographically least
assignment in the system's variable order. An avoiding colouring is the
lexicographically least one with point 1 coloured 0 and colours introduced
in order of first use.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from .coloring import Coloring
from .errors import MalformedInputError, SolverError, TooLargeError
from .matrix import evaluate_image
from .systems import IMAGE, KERNEL, LinearSystem

FORCED = "forced"
AVOIDABLE = "avoidable"
UNKNOWN = "unknown"

SOLVER_ENV = "PARTREG_SAT_SOLVER"


@dataclass(frozen=True)
class ImageWitness:
    assignment: dict[str, int]
    image_values: tuple[int, ...]
    color: int
    mode: str = IMAGE

    @property
    def points(self) -> tuple[int, ...]:
        """The coloured values: row values in image mode, variables in kernel mode."""
        if self.mode == KERNEL:
            return tuple(self.assignment.values())
        return self.image_values

    def to_json(self) -> dict:
        return {"assignment": self.assignment, "image_values": list(self.image_values),
                "color": self.color, "mode": self.mode}


@dataclass(frozen=True)
class ForcedResult:
    verdict: str
    avoiding_coloring: Coloring | None = None
    nodes: int = 0
    seconds: float = 0.0
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "avoiding_coloring": None if self.avoiding_coloring is None else self.avoiding_coloring.to_json(),
            "stats": {"nodes": self.nodes, "seconds": round(self.seconds, 6)},
            "params": self.params,
        }


def _assignments(system: LinearSystem, N: int, var_bound: int,
                 coloring: Coloring | None = None) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(values, color)`` for every bounded witness, in lexicographic order.

    Without a colouring every assignment whose coloured values lie in
    ``[1..N]`` is produced and the colour is reported as -1.
    """
    if var_bound < 1:
        raise MalformedInputError(f"var_bound must be >= 1, got {var_bound}")
    k = system.n_vars
    rows = system.matrix.rows
    kernel = system.mode == KERNEL
    lo_t, hi_t = (0, 0) if kernel else (1, N)
    vmax = min(var_bound, N) if kernel else var_bound
    if k == 0 or vmax < 1:
        return

    touching: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    # rest_lo[r][j] / rest_hi[r][j]: extreme contribution of the variables
    # after j in row r, each ranging over [1, vmax].
    rest_lo: list[list[int]] = []
    rest_hi: list[list[int]] = []
    for r, row in enumerate(rows):
        coeff = dict(row)
        lo_acc = hi_acc = 0
        lo_row = [0] * k
        hi_row = [0] * k
        for j in range(k - 1, -1, -1):
            lo_row[j], hi_row[j] = lo_acc, hi_acc
            c = coeff.get(j, 0)
            if c:
                touching[j].append((r, c))
                lo_acc += min(c, c * vmax)
                hi_acc += max(c, c * vmax)
        rest_lo.append(lo_row)
        rest_hi.append(hi_row)
    # rows whose last variable is j; their value is known once j is set
    closing: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    for r, row in enumerate(rows):
        if row:
            col, c = row[-1]
            closing[col].append((r, c))
    # rows with no variables at all must already sit in the target range
    for row in rows:
        if not row and not lo_t <= 0 <= hi_t:
            return
    colors = None if coloring is None else coloring.colors

    partial = [0] * len(rows)
    values = [0] * k

    def rec(j: int, color: int):
        for val in range(1, vmax + 1):
            stop = skip = False
            for r, c in touching[j]:
                s = partial[r] + c * val
                if s + rest_lo[r][j] > hi_t:
                    if c > 0:
                        stop = True
                        break
                    skip = True
                elif s + rest_hi[r][j] < lo_t:
                    if c < 0:
                        stop = True
                        break
                    skip = True
            if stop:
                return
            if skip:
                continue
            new_color = color
            if colors is not None:
                ok = True
                if kernel:
                    cv = colors[val - 1]
                    if new_color < 0:
                        new_color = cv
                    elif cv != new_color:
                        ok = False
                else:
                    for r, c in closing[j]:
                        cv = colors[partial[r] + c * val - 1]
                        if new_color < 0:
                            new_color = cv
                        elif cv != new_color:
                            ok = False
                            break
                if not ok:
                    continue
            values[j] = val
            for r, c in touching[j]:
                partial[r] += c * val
            if j + 1 == k:
                yield tuple(values), new_color
            else:
                yield from rec(j + 1, new_color)
            for r, c in touching[j]:
                partial[r] -= c * val

    yield from rec(0, -1)


def _witness(system: LinearSystem, values: tuple[int, ...], color: int) -> ImageWitness:
    image = evaluate_image(system.matrix, values)
    return ImageWitness(dict(zip(system.variables, values)), image, color, system.mode)


def mono_witness(system: LinearSystem, coloring: Coloring, var_bound: int) -> ImageWitness | None:
    """Lexicographically least monochromatic witness under ``coloring``, or None.

    Examples
    --------
    >>> from partreg.systems import schur_system
    >>> mono_witness(schur_system(), Coloring.constant(4), 4).image_values
    (1, 1, 2)
    """
    for values, color in _assignments(system, coloring.N, var_bound, coloring):
        # a system without rows colours nothing; report colour 0
        return _witness(system, values, max(color, 0))
    return None


def witness_point_sets(system: LinearSystem, N: int, var_bound: int) -> list[tuple[int, ...]]:
    """Distinct coloured point sets of all bounded witnesses, minimal under inclusion.

    A colouring admits a monochromatic witness iff one of these sets is
    monochromatic.
    """
    kernel = system.mode == KERNEL
    sets = set()
    for values, _ in _assignments(system, N, var_bound):
        pts = values if kernel else _image(system, values)
        sets.add(frozenset(pts))
    ordered = sorted(sets, key=lambda s: (len(s), sorted(s)))
    minimal: list[frozenset] = []
    for s in ordered:
        if not any(m <= s for m in minimal):
            minimal.append(s)
    return sorted(tuple(sorted(s)) for s in minimal)


def _image(system: LinearSystem, values) -> tuple[int, ...]:
    return tuple(sum(c * values[col] for col, c in row) for row in system.matrix.rows)


def _dfs(edges_by_max: list[list[tuple[int, ...]]], r: int, N: int,
         prefix: tuple[int, ...], budget: int | None) -> tuple[str, tuple[int, ...] | None, int]:
    """Backtracking over colourings of 1..N that extend ``prefix``."""
    colors = [-1] * (N + 2)
    used = [-1] * (N + 2)  # used[p]: largest colour among points < p
    nxt = [0] * (N + 2)
    nodes = 0
    for p, c in enumerate(prefix, start=1):
        colors[p] = c
        used[p + 1] = max(used[p], c)
        if any(all(colors[q] == c for q in e) for e in edges_by_max[p]):
            return FORCED, None, nodes
    p = len(prefix) + 1
    start = p
    if p > N:
        return AVOIDABLE, tuple(colors[1:N + 1]), nodes
    nxt[p] = 0
    while p >= start:
        c = nxt[p]
        limit = 0 if p == 1 else min(r - 1, used[p] + 1)
        if c > limit:
            colors[p] = -1
            p -= 1
            continue
        nxt[p] = c + 1
        nodes += 1
        if budget is not None and nodes > budget:
            return UNKNOWN, None, nodes
        colors[p] = c
        if any(all(colors[q] == c for q in e) for e in edges_by_max[p]):
            continue
        if p == N:
            return AVOIDABLE, tuple(colors[1:N + 1]), nodes
        used[p + 1] = max(used[p], c)
        p += 1
        nxt[p] = 0
    return FORCED, None, nodes


def _prefixes(r: int, depth: int) -> list[tuple[int, ...]]:
    out = [()]
    for p in range(1, depth + 1):
        grown = []
        for pre in out:
            limit = 0 if p == 1 else min(r - 1, max(pre) + 1)
            grown.extend(pre + (c,) for c in range(limit + 1))
        out = grown
    return out


def forced(system: LinearSystem, r: int, N: int, var_bound: int | None = None,
           budget: int | None = None, workers: int = 1) -> ForcedResult:
    """Decide whether every ``r``-colouring of ``[1..N]`` has a monochromatic witness.

    The verdict is ``"unknown"`` when more than ``budget`` search nodes are
    needed. With ``workers > 1`` the colourings are split by the colours of
    the first few points across a process pool; ``budget`` then applies to
    each part, and results are combined in prefix order, so verdict and
    avoiding colouring do not depend on ``workers``.
    """
    if r < 1 or N < 1:
        raise MalformedInputError("need r >= 1 and N >= 1")
    var_bound = N if var_bound is None else var_bound
    params = {"r": r, "N": N, "var_bound": var_bound, "budget": budget}
    t0 = time.perf_counter()
    edges = witness_point_sets(system, N, var_bound)
    edges_by_max: list[list[tuple[int, ...]]] = [[] for _ in range(N + 2)]
    for e in edges:
        edges_by_max[e[-1]].append(e[:-1])

    if workers <= 1 or N < 4:
        status, colors, nodes = _dfs(edges_by_max, r, N, (), budget)
        results = [(status, colors, nodes)]
    else:
        depth = min(N - 1, 3)
        prefixes = _prefixes(r, depth)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_dfs, [edges_by_max] * len(prefixes), [r] * len(prefixes),
                                    [N] * len(prefixes), prefixes, [budget] * len(prefixes)))
    nodes = sum(n for _, _, n in results)
    verdict, found = FORCED, None
    for status, colors, _ in results:
        if status == AVOIDABLE:
            verdict, found = AVOIDABLE, Coloring(r, colors)
            break
        if status == UNKNOWN:
            verdict = UNKNOWN
            break
    return ForcedResult(verdict, found, nodes, time.perf_counter() - t0, params)


@dataclass(frozen=True)
class MinForcingResult:
    value: int | None
    verdict: str  # "found", "not-found" or "unknown"
    checked: tuple[tuple[int, str], ...] = ()

    def to_json(self) -> dict:
        return {"value": self.value, "verdict": self.verdict,
                "checked": [{"N": n, "verdict": v} for n, v in self.checked]}


def min_forcing_N(system: LinearSystem, r: int, N_max: int, var_bound: int | None = None,
                  budget: int | None = None, workers: int = 1) -> MinForcingResult:
    """Least ``N <= N_max`` with a ``forced`` verdict.

    ``var_bound`` defaults to the window size at each ``N``. An ``unknown``
    verdict before any forced one makes the whole answer unknown.
    """
    checked = []
    for N in range(1, N_max + 1):
        res = forced(system, r, N, var_bound, budget, workers)
        checked.append((N, res.verdict))
        if res.verdict == FORCED:
            return MinForcingResult(N, "found", tuple(checked))
        if res.verdict == UNKNOWN:
            return MinForcingResult(None, UNKNOWN, tuple(checked))
    return MinForcingResult(None, "not-found", tuple(checked))


@dataclass
class CNF:
    """Avoiding-colouring encoding: satisfiable iff some colouring of ``[1..N]``
    with ``r`` colours has no monochromatic bounded witness."""

    n_vars: int
    clauses: list[tuple[int, ...]]
    r: int
    N: int
    system: LinearSystem | None = None
    var_bound: int | None = None

    def var(self, point: int, color: int) -> int:
        return (point - 1) * self.r + color + 1

    def to_dimacs(self) -> str:
        lines = [
            "c partreg avoiding-colouring encoding",
            f"c points 1..{self.N}, colours 0..{self.r - 1}",
            f"c variable (t - 1) * {self.r} + c + 1 means point t has colour c",
        ]
        if self.var_bound is not None:
            lines.append(f"c witnesses bounded by var_bound = {self.var_bound}")
        lines.append(f"p cnf {self.n_vars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, cl)) + " 0" for cl in self.clauses)
        return "\n".join(lines) + "\n"

    def decode(self, model) -> Coloring:
        true = {lit for lit in model if lit > 0}
        colors = []
        for t in range(1, self.N + 1):
            cs = [c for c in range(self.r) if self.var(t, c) in true]
            if len(cs) != 1:
                raise SolverError(f"model gives point {t} {len(cs)} colours")
            colors.append(cs[0])
        return Coloring(self.r, tuple(colors))


def export_cnf(system: LinearSystem, r: int, N: int, var_bound: int | None = None,
               max_clauses: int = 5_000_000) -> CNF:
    var_bound = N if var_bound is None else var_bound
    edges = witness_point_sets(system, N, var_bound)
    estimate = N + N * r * (r - 1) // 2 + len(edges) * r
    if estimate > max_clauses:
        raise TooLargeError(f"encoding needs {estimate} clauses, cap is {max_clauses}")
    cnf = CNF(N * r, [], r, N, system, var_bound)
    for t in range(1, N + 1):
        cnf.clauses.append(tuple(cnf.var(t, c) for c in range(r)))
        for c1 in range(r):
            for c2 in range(c1 + 1, r):
                cnf.clauses.append((-cnf.var(t, c1), -cnf.var(t, c2)))
    for e in edges:
        for c in range(r):
            cnf.clauses.append(tuple(-cnf.var(t, c) for t in e))
    return cnf


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    model: tuple[int, ...] | None = None
    coloring: Coloring | None = None

    def to_json(self) -> dict:
        return {"satisfiable": self.satisfiable,
                "coloring": None if self.coloring is None else self.coloring.to_json()}


def parse_solver_output(text: str) -> tuple[bool, list[int] | None]:
    """Parse SAT-competition output (``s ...`` and ``v ...`` lines)."""
    status = None
    model: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = True
            elif word == "UNSATISFIABLE":
                status = False
            else:
                raise SolverError(f"solver reported {line!r}")
        elif line.startswith("v "):
            try:
                model.extend(int(tok) for tok in line[2:].split())
            except ValueError:
                raise SolverError(f"unparseable model line {line!r}") from None
    if status is None:
        raise SolverError("no 's SATISFIABLE' or 's UNSATISFIABLE' line in solver output")
    if status:
        if not model:
            raise SolverError("satisfiable answer without a model")
        return True, [lit for lit in model if lit != 0]
    return False, None


def solve_external(cnf: CNF, solver_command: str | None = None, timeout: float | None = None) -> SatResult:
    """Run an external solver on ``cnf`` and decode a model back to a colouring.

    The command (or ``$PARTREG_SAT_SOLVER``) is split shell-style and the
    DIMACS file path is appended. A returned colouring is checked to admit
    no witness before it is reported.
    """
    command = solver_command or os.environ.get(SOLVER_ENV)
    if not command:
        raise SolverError(f"no solver command given and ${SOLVER_ENV} is unset")
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "instance.cnf")
        with open(path, "w") as fh:
            fh.write(cnf.to_dimacs())
        try:
            proc = subprocess.run(shlex.split(command) + [path], capture_output=True,
                                  text=True, timeout=timeout)
        except FileNotFoundError:
            raise SolverError(f"solver executable not found: {command!r}") from None
        except subprocess.TimeoutExpired:
            raise SolverError(f"solver timed out after {timeout} s") from None
    # 10 and 20 are the conventional SAT / UNSAT exit codes.
    if proc.returncode not in (0, 10, 20):
        raise SolverError(f"solver exited with status {proc.returncode}: {proc.stderr.strip()[:200]}")
    sat, model = parse_solver_output(proc.stdout)
    if not sat:
        return SatResult(False)
    lits = set(model)
    for cl in cnf.clauses:
        if not any(lit in lits for lit in cl):
            raise SolverError(f"model violates clause {cl}")
    coloring = cnf.decode(model)
    if cnf.system is not None:
        w = mono_witness(cnf.system, coloring, cnf.var_bound or cnf.N)
        if w is not None:
            raise SolverError(f"decoded colouring admits witness {w.assignment}")
    return SatResult(True, tuple(model), coloring)
