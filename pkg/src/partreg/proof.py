"""Run the density-and-Rado construction against a concrete colouring.

Given a colouring of ``[1..W]`` and coefficients ``a_1, a_2, ...``, the
executor builds a monochromatic image of the truncated system
``gen_dh_truncation(n_max, a)`` in stages:

1. restrict to ``q N`` while some colour class misses every multiple of ``q``;
2. measure the classes on the window, take the least dense density ``d``,
   ``m = lcm(1..floor(1/d))`` and ``N = ceil(2/d) - 1``;
3. solve the finite system ``u_n = sum_i x_ni``, ``v_ni = x_ni + a_n y``
   (``n <= N``) inside one dense class along a progression ``mc . [l]``;
4. for ``n > N`` pick ``xt_ni`` in ``A_{>a_n y}`` with
   ``z_n = sum_i xt_ni - n a_n y`` also in ``A_{>a_n y}``, and set
   ``x_ni = xt_ni - a_n y``.

Every run ends with a verification that uses only the matrix, the
assignment and raw colour lookups. No witness leaves this module
unverified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coloring import Coloring
from .errors import MalformedInputError
from .matrix import evaluate_image
from .search import ImageWitness
from .sumsets import WindowSet, filter_above, find_progression, lcm_bound, least_representation
from .systems import LinearSystem, gen_dh_truncation

OK = "ok"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"


@dataclass
class ProofParams:
    theta: Fraction | None = None  # dense threshold; None means 1/(2r)
    l_max: int = 64
    q_max: int = 12
    proxy_n: int | None = None  # None means the (reduced) window size
    min_support: int | None = None  # None means q_max

    def to_json(self) -> dict:
        return {"theta": None if self.theta is None else str(self.theta), "l_max": self.l_max,
                "q_max": self.q_max, "proxy_n": self.proxy_n, "min_support": self.min_support}


@dataclass
class TraceStep:
    name: str
    verdict: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    reason: str = ""

    def to_json(self) -> dict:
        return {"step": self.name, "verdict": self.verdict, "inputs": _jsonable(self.inputs),
                "outputs": _jsonable(self.outputs), "reason": self.reason}


@dataclass
class ProofTrace:
    steps: list[TraceStep] = field(default_factory=list)
    witness: ImageWitness | None = None

    @property
    def success(self) -> bool:
        return self.witness is not None

    @property
    def failed_step(self) -> TraceStep | None:
        return next((s for s in self.steps if s.verdict == FAILED), None)

    def step(self, name: str) -> TraceStep:
        return next(s for s in self.steps if s.name == name)

    def to_json(self) -> dict:
        return {"success": self.success,
                "steps": [s.to_json() for s in self.steps],
                "witness": None if self.witness is None else self.witness.to_json()}

    def to_text(self) -> str:
        lines = []
        for s in self.steps:
            line = f"[{s.verdict:>12}] {s.name}"
            if s.outputs:
                shown = ", ".join(f"{k}={_short(v)}" for k, v in s.outputs.items())
                line += f": {shown}"
            if s.reason:
                line += f"  ({s.reason})"
            lines.append(line)
        lines.append("SUCCESS" if self.success else "FAILURE")
        return "\n".join(lines)


def _short(v) -> str:
    text = str(_jsonable(v))
    return text if len(text) <= 60 else text[:57] + "..."


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# --- subgroup reduction -----------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    coloring: Coloring
    multiplier: int
    rounds: tuple[tuple[int, int], ...]  # (q, colour class with no multiple of q)
    inconclusive: bool
    untested: tuple[int, ...] = ()


def subgroup_reduce(coloring: Coloring, q_max: int = 12, min_support: int | None = None) -> Reduction:
    """Pass to ``q . N`` while some colour class has no multiple of ``q``.

    The reduced colouring is ``k -> colour(M k)`` on ``[1..W // M]``, keeping
    the original colour labels. A modulus is only tested while the window
    holds at least ``min_support`` multiples of it; skipped moduli make the
    result ``inconclusive``.
    """
    min_support = q_max if min_support is None else min_support
    cur, mult = coloring, 1
    rounds = []
    untested: set[int] = set()
    while True:
        hit = None
        present = cur.used_colors()
        for q in range(2, q_max + 1):
            if cur.N // q < min_support:
                untested.add(q * mult)
                continue
            has_multiple = {cur.colors[k - 1] for k in range(q, cur.N + 1, q)}
            missing = [c for c in present if c not in has_multiple]
            if missing:
                hit = (q, missing[0])
                break
        if hit is None:
            break
        q, color = hit
        rounds.append((q, color))
        mult *= q
        cur = Coloring(cur.r, tuple(cur.colors[q * k - 1] for k in range(1, cur.N // q + 1)))
    return Reduction(cur, mult, tuple(rounds), bool(untested), tuple(sorted(untested)))


# --- density census ---------------------------------------------------------

@dataclass(frozen=True)
class Census:
    densities: dict[int, Fraction]
    dense: tuple[int, ...]
    theta: Fraction
    d: Fraction
    m: int
    N: int


def dense_census(coloring: Coloring, proxy_n: int | None = None, theta=None) -> Census:
    """Window densities of the colour classes, ``d``, ``m`` and ``N``.

    A class is dense when its density proxy on ``[1..proxy_n]`` is at least
    ``theta`` (default ``1/(2k)`` for ``k`` colours in use). Since some class
    always reaches ``1/k``, the default never leaves every class sparse.
    """
    n = coloring.N if proxy_n is None else proxy_n
    if not 1 <= n <= coloring.N:
        raise MalformedInputError(f"proxy_n={n} outside 1..{coloring.N}")
    used = coloring.used_colors()
    theta = Fraction(1, 2 * len(used)) if theta is None else Fraction(theta)
    counts = dict.fromkeys(used, 0)
    for c in coloring.colors[:n]:
        counts[c] += 1
    densities = {c: Fraction(k, n) for c, k in counts.items()}
    dense = tuple(c for c in used if densities[c] > 0 and densities[c] >= theta)
    if not dense:
        raise MalformedInputError(f"no colour class reaches density {theta}")
    d = min(densities[c] for c in dense)
    return Census(densities, dense, theta, d, lcm_bound(d), math.ceil(2 / d) - 1)


# --- finite part ------------------------------------------------------------

@dataclass(frozen=True)
class RadoSolution:
    y: int
    x: dict[tuple[int, int], int]
    color: int
    c: int
    l: int

    def images(self, a: Sequence[int]) -> dict[str, int]:
        """The values ``u_n`` and ``v_ni`` of the finite system."""
        out = {}
        blocks = sorted({n for n, _ in self.x})
        for n in blocks:
            xs = [self.x[n, i] for i in range(1, n + 1)]
            out[f"u_{n}"] = sum(xs)
            for i, xv in enumerate(xs, start=1):
                out[f"v_{n}_{i}"] = xv + a[n - 1] * self.y
        return out


@dataclass(frozen=True)
class RadoFailure:
    reason: str
    largest_tried: tuple[int, int] | None  # (c, l)


def _solve_blocks(points: list[int], y: int, a: Sequence[int], N: int) -> dict | None:
    lo, hi = points[0], points[-1]
    pset = WindowSet.from_members(points, lo, hi)
    x = {}
    for n in range(1, N + 1):
        shift = a[n - 1] * y
        cand = [p - shift for p in points if p - shift >= 1]
        if not cand:
            return None
        tup = least_representation(WindowSet.from_members(cand, cand[0], cand[-1]), n, pset)
        if tup is None:
            return None
        for i, v in enumerate(tup, start=1):
            x[n, i] = v
    return x


def rado_step(coloring: Coloring, a: Sequence[int], N: int, m: int, l_max: int,
              dense_classes: Sequence[int]) -> RadoSolution | RadoFailure:
    """Solve ``u_n = sum_i x_ni``, ``v_ni = x_ni + a_n y`` for ``n <= N`` with
    ``y``, every ``u_n`` and every ``v_ni`` in one dense class and on the
    progression ``mc . [l]``, where ``c . [ml]`` avoids the sparse classes.

    Progressions are tried for ``l = 1, 2, ..., l_max``; within one, dense
    classes in label order and then ``y`` ascending. For fixed ``y`` the
    blocks are independent, and each takes its least ``(x_n1, ..., x_nn)``.
    """
    if N < 1:
        raise MalformedInputError("N must be >= 1")
    tried = None
    for l in range(1, l_max + 1):
        c = find_progression(coloring, m * l, dense_classes)
        if c is None:
            if tried is None:
                return RadoFailure("no qualifying progression", None)
            return RadoFailure(f"window exhausted: no progression of length {m * l}", tried)
        tried = (c, l)
        prog = [m * c * j for j in range(1, l + 1)]
        for color in sorted(dense_classes):
            pts = [p for p in prog if coloring(p) == color]
            for y in pts:
                x = _solve_blocks(pts, y, a, N)
                if x is not None:
                    return RadoSolution(y, x, color, c, l)
    return RadoFailure(f"no solution on progressions up to l_max={l_max}", tried)


# --- infinite part, truncated ---------------------------------------------------

@dataclass(frozen=True)
class Extension:
    xt: dict[tuple[int, int], int]
    z: dict[int, int]
    x: dict[tuple[int, int], int]
    failed: tuple[int, ...] = ()


def sumset_extend(A: WindowSet, y: int, m: int, a: Sequence[int], n_range: range) -> Extension:
    """Blocks ``n`` in ``n_range`` from elements of ``A_{>a_n y}``.

    For each block the least nondecreasing ``(xt_n1, ..., xt_nn)`` in
    ``A_{>a_n y}`` is chosen such that ``z_n = sum_i xt_ni - n a_n y`` is in
    ``A_{>a_n y}`` too; then ``x_ni = xt_ni - a_n y``. Blocks with no such
    choice inside the window are listed in ``failed``.
    """
    if m < 1 or y % m:
        raise MalformedInputError(f"y={y} is not divisible by m={m}")
    xt, z, x = {}, {}, {}
    failed = []
    for n in n_range:
        t = a[n - 1] * y
        big = filter_above(A, t)
        if not big:
            failed.append(n)
            continue
        targets = WindowSet(big.lo + n * t, big.hi + n * t, big.bits)
        tup = least_representation(big, n, targets)
        if tup is None:
            failed.append(n)
            continue
        z[n] = sum(tup) - n * t
        for i, v in enumerate(tup, start=1):
            xt[n, i] = v
            x[n, i] = v - t
    return Extension(xt, z, x, tuple(failed))


# --- verification -----------------------------------------------------------

def verify_image_witness(system: LinearSystem, assignment: dict[str, int],
                         coloring: Coloring) -> tuple[bool, str, int | None]:
    """Independent check: every variable >= 1, every row value in the window,
    all row values one colour. Returns ``(ok, reason, colour)``."""
    vec = system.vector(assignment)
    if min(vec) < 1:
        bad = system.variables[vec.index(min(vec))]
        return False, f"variable {bad} = {min(vec)} is not positive", None
    image = evaluate_image(system.matrix, vec)
    for r, v in enumerate(image):
        if not 1 <= v <= coloring.N:
            return False, f"row {r + 1} value {v} outside 1..{coloring.N}", None
    colours = {coloring.colors[v - 1] for v in image}
    if len(colours) != 1:
        return False, f"row values carry colours {sorted(colours)}", None
    return True, "", colours.pop()


# --- orchestration ------------------------------------------------------------

def execute_proof(coloring: Coloring, a: Sequence[int], n_max: int,
                  params: ProofParams | None = None) -> ProofTrace:
    """Build and verify a monochromatic image of ``gen_dh_truncation(n_max, a)``."""
    params = params or ProofParams()
    if len(a) < n_max:
        raise MalformedInputError(f"need {n_max} coefficients, got {len(a)}")
    a = [int(v) for v in a[:n_max]]
    trace = ProofTrace()
    system = gen_dh_truncation(n_max, a)

    red = subgroup_reduce(coloring, params.q_max, params.min_support)
    trace.steps.append(TraceStep(
        "subgroup-reduction", INCONCLUSIVE if red.inconclusive else OK,
        {"window": coloring.N, "q_max": params.q_max},
        {"multiplier": red.multiplier, "rounds": [list(r) for r in red.rounds],
         "reduced_window": red.coloring.N},
        f"moduli {list(red.untested)} too large to test on this window" if red.inconclusive else ""))
    col = red.coloring
    if col.N < 1:
        trace.steps.append(TraceStep("dense-class-census", FAILED, reason="reduced window is empty"))
        return trace

    proxy_n = min(params.proxy_n, col.N) if params.proxy_n else col.N
    try:
        census = dense_census(col, proxy_n, params.theta)
    except MalformedInputError as exc:
        trace.steps.append(TraceStep("dense-class-census", FAILED, {"proxy_n": proxy_n}, reason=str(exc)))
        return trace
    trace.steps.append(TraceStep(
        "dense-class-census", OK, {"proxy_n": proxy_n, "theta": census.theta},
        {"densities": census.densities, "dense": list(census.dense)}))
    N_eff = min(census.N, n_max)
    trace.steps.append(TraceStep(
        "compute-d-m-N", OK, {"dense": list(census.dense)},
        {"d": census.d, "m": census.m, "N": census.N, "N_used": N_eff}))

    rado = rado_step(col, a, N_eff, census.m, params.l_max, census.dense)
    if isinstance(rado, RadoFailure):
        trace.steps.append(TraceStep("rado-step", FAILED, {"N": N_eff, "m": census.m, "l_max": params.l_max},
                                     {"largest_tried": rado.largest_tried}, rado.reason))
        return trace
    trace.steps.append(TraceStep(
        "rado-step", OK, {"N": N_eff, "m": census.m, "l_max": params.l_max},
        {"c": rado.c, "l": rado.l, "color": rado.color, "y": rado.y,
         "x": {f"x_{n}_{i}": v for (n, i), v in rado.x.items()}, **rado.images(a)}))

    if rado.y % census.m:
        trace.steps.append(TraceStep("divisibility-check", FAILED, {"y": rado.y, "m": census.m},
                                     reason="m does not divide y"))
        return trace
    trace.steps.append(TraceStep("divisibility-check", OK, {"y": rado.y, "m": census.m}))

    A = WindowSet.from_members((p for p in range(1, col.N + 1) if col.colors[p - 1] == rado.color), 1, col.N)
    ext = sumset_extend(A, rado.y, census.m, a, range(N_eff + 1, n_max + 1))
    ext_out = {"xt": {f"xt_{n}_{i}": v for (n, i), v in ext.xt.items()},
               "z": {f"z_{n}": v for n, v in ext.z.items()}}
    if ext.failed:
        trace.steps.append(TraceStep(
            "sumset-extension", FAILED, {"blocks": [N_eff + 1, n_max], "window": col.N}, ext_out,
            f"no representation inside the window for blocks {list(ext.failed)} (window-inconclusive)"))
        return trace
    trace.steps.append(TraceStep("sumset-extension", OK, {"blocks": [N_eff + 1, n_max]}, ext_out))

    reduced = {"y": rado.y}
    reduced.update({f"x_{n}_{i}": v for (n, i), v in rado.x.items()})
    reduced.update({f"x_{n}_{i}": v for (n, i), v in ext.x.items()})
    low = [k for k, v in reduced.items() if v < 1]
    low += [f"xt_{n}_{i}" for (n, i), v in ext.xt.items() if v <= a[n - 1] * rado.y]
    if low:
        trace.steps.append(TraceStep("positivity-check", FAILED, outputs={"offending": low},
                                     reason="non-positive variables"))
        return trace
    trace.steps.append(TraceStep("positivity-check", OK, outputs={"min_variable": min(reduced.values())}))

    assignment = {k: v * red.multiplier for k, v in reduced.items()}
    ok, reason, colour = verify_image_witness(system, assignment, coloring)
    if not ok:
        trace.steps.append(TraceStep("final-verification", FAILED, {"multiplier": red.multiplier},
                                     {"assignment": assignment}, reason))
        return trace
    image = evaluate_image(system.matrix, system.vector(assignment))
    witness = ImageWitness({name: assignment[name] for name in system.variables}, image, colour)
    trace.steps.append(TraceStep("final-verification", OK, {"multiplier": red.multiplier},
                                 {"color": colour, "max_value": max(image)}))
    trace.witness = witness
    return trace
