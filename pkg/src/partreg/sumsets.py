"""Set arithmetic on finite integer windows and window-level lemma checks.

A :class:`WindowSet` is a finite set of integers together with the window
``[lo, hi]`` it was computed in, stored as a Python integer bitmask (bit
``k`` stands for ``lo + k``), so negative members need no special casing.

Upper density cannot be read off a finite window. Every density used here is
the exact finite proxy ``|S & [1..n]| / n``, and the lemma checkers report
``window-inconclusive`` whenever truncation could explain a miss, rather
than a counterexample.

A set may carry a ``period`` ``q``. This declares that the set is the
window restriction of the set of all integers ``>= lo`` whose residue mod
``q`` occurs in the window. The checkers use it to tell genuine failures
(a residue obstruction) from truncation effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import numpy as np

from .coloring import Coloring
from .errors import MalformedInputError, WindowError

HOLDS = "holds-on-window"
FAILS = "fails"
INCONCLUSIVE = "window-inconclusive"

# Below this many shifts the bitmask shift-or loop beats an FFT convolution.
_SHIFT_OR_LIMIT = 2048


def _mask(width: int) -> int:
    return (1 << width) - 1 if width > 0 else 0


@dataclass(frozen=True)
class WindowSet:
    lo: int
    hi: int
    bits: int = 0
    period: int | None = None
    clipped: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.lo > self.hi:
            raise WindowError(f"empty window [{self.lo}, {self.hi}]")
        if self.bits < 0 or self.bits >> self.width:
            raise WindowError("members outside the window")
        if self.period is not None and self.period < 1:
            raise MalformedInputError("period must be >= 1")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    @classmethod
    def from_members(cls, members: Iterable[int], lo: int, hi: int,
                     period: int | None = None) -> WindowSet:
        bits = 0
        for v in members:
            if not lo <= v <= hi:
                raise WindowError(f"member {v} outside window [{lo}, {hi}]")
            bits |= 1 << (v - lo)
        return cls(lo, hi, bits, period)

    @classmethod
    def full(cls, lo: int, hi: int) -> WindowSet:
        return cls(lo, hi, _mask(hi - lo + 1), 1)

    @classmethod
    def residue(cls, r: int, q: int, lo: int, hi: int) -> WindowSet:
        """All ``v`` in ``[lo, hi]`` with ``v = r (mod q)``, marked periodic."""
        start = lo + (r - lo) % q
        return cls.from_members(range(start, hi + 1, q), lo, hi, period=q)

    def members(self) -> list[int]:
        if not self.bits:
            return []
        arr = np.unpackbits(
            np.frombuffer(self.bits.to_bytes((self.width + 7) // 8, "little"), dtype=np.uint8),
            bitorder="little")
        return (np.flatnonzero(arr) + self.lo).tolist()

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi and bool(self.bits >> (v - self.lo) & 1)

    def __bool__(self) -> bool:
        return self.bits != 0

    def min(self) -> int:
        if not self.bits:
            raise ValueError("min of an empty set")
        return self.lo + ((self.bits & -self.bits).bit_length() - 1)

    def max(self) -> int:
        if not self.bits:
            raise ValueError("max of an empty set")
        return self.lo + self.bits.bit_length() - 1

    def count_between(self, a: int, b: int) -> int:
        """Number of members in ``[a, b]``, which must lie inside the window."""
        if a > b:
            return 0
        if a < self.lo or b > self.hi:
            raise WindowError(f"[{a}, {b}] not inside window [{self.lo}, {self.hi}]")
        return bin((self.bits >> (a - self.lo)) & _mask(b - a + 1)).count("1")

    def restrict(self, lo: int, hi: int) -> WindowSet:
        """Clip to ``[lo, hi]``; ``clipped`` records whether members were dropped."""
        kept = _shift(self.bits, self.lo - lo) & _mask(hi - lo + 1)
        dropped = len(self) != bin(kept).count("1")
        return WindowSet(lo, hi, kept, self.period, self.clipped or dropped)

    def residues(self) -> set[int]:
        if self.period is None:
            raise MalformedInputError("set has no declared period")
        return {v % self.period for v in self.members()}

    def to_json(self) -> dict:
        doc = {"lo": self.lo, "hi": self.hi, "members": self.members()}
        if self.period is not None:
            doc["period"] = self.period
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> WindowSet:
        try:
            lo, hi = int(doc["lo"]), int(doc["hi"])
        except (KeyError, TypeError, ValueError):
            raise MalformedInputError("window set needs integer 'lo' and 'hi'") from None
        if "members" in doc:
            period = doc.get("period")
            return cls.from_members((int(v) for v in doc["members"]), lo, hi,
                                    None if period is None else int(period))
        if "residue" in doc and "modulus" in doc:
            return cls.residue(int(doc["residue"]), int(doc["modulus"]), lo, hi)
        raise MalformedInputError("window set needs 'members' or 'residue' and 'modulus'")


def _shift(bits: int, k: int) -> int:
    return bits << k if k >= 0 else bits >> -k


def _to_array(bits: int, width: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((width + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:width]


def _from_array(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr.astype(np.uint8), bitorder="little").tobytes(), "little")


def _sum_bits(a: WindowSet, b: WindowSet) -> int:
    """Bitmask of ``a + b`` relative to offset ``a.lo + b.lo``."""
    if not a.bits or not b.bits:
        return 0
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    if len(small) <= _SHIFT_OR_LIMIT:
        out = 0
        for v in small.members():
            out |= big.bits << (v - small.lo)
        return out
    # Both operands are large: exact 0/1 convolution through a real FFT.
    # Counts are integers below min(|a|, |b|), far inside float64 precision.
    n = a.width + b.width - 1
    size = 1 << (n - 1).bit_length()
    fa = np.fft.rfft(_to_array(a.bits, a.width).astype(np.float64), size)
    fb = np.fft.rfft(_to_array(b.bits, b.width).astype(np.float64), size)
    conv = np.fft.irfft(fa * fb, size)[:n]
    return _from_array(conv > 0.5)


def _output(bits: int, lo: int, hi: int, out: tuple[int, int] | None, clipped: bool) -> WindowSet:
    full = WindowSet(lo, hi, bits, None, clipped)
    if out is None:
        return full
    return full.restrict(*out)


def sumset(A: WindowSet, B: WindowSet, out: tuple[int, int] | None = None) -> WindowSet:
    """``A + B``, clipped to the caller's output window ``out`` if given."""
    return _output(_sum_bits(A, B), A.lo + B.lo, A.hi + B.hi, out, A.clipped or B.clipped)


def negate(A: WindowSet) -> WindowSet:
    """``-A``; the bitmask is simply reversed within the mirrored window."""
    bits = int(format(A.bits, f"0{A.width}b")[::-1], 2) if A.bits else 0
    return WindowSet(-A.hi, -A.lo, bits, A.period, A.clipped)


def diffset(A: WindowSet, B: WindowSet, out: tuple[int, int] | None = None) -> WindowSet:
    """``A - B = {a - b}``, clipped to ``out`` if given."""
    return sumset(A, negate(B), out)


def iterate(k: int, A: WindowSet, out: tuple[int, int] | None = None) -> WindowSet:
    """The ``k``-fold sumset ``kA`` (``0A = {0}``).

    Intermediate sums are pruned to the range that can still reach ``out``
    after adding the remaining summands, so the result is exact on ``out``.
    """
    if k < 0:
        raise MalformedInputError(f"iterate needs k >= 0, got {k}")
    if k == 0:
        acc = WindowSet(0, 0, 1)
        return acc if out is None else acc.restrict(*out)
    if not A.bits:
        lo, hi = out if out is not None else (k * A.lo, k * A.hi)
        return WindowSet(lo, hi, 0, None, A.clipped)
    amin, amax = A.min(), A.max()
    acc = WindowSet(A.lo, A.hi, A.bits, None, A.clipped)
    dropped = False
    for j in range(2, k + 1):
        acc = sumset(acc, A)
        if out is not None:
            rest = k - j
            lo = max(acc.lo, out[0] - rest * amax)
            hi = min(acc.hi, out[1] - rest * amin)
            if lo > hi:
                return WindowSet(out[0], out[1], 0, None, True)
            before = len(acc)
            acc = acc.restrict(lo, hi)
            dropped = dropped or len(acc) != before
    acc = replace(acc, clipped=acc.clipped or dropped)
    return acc if out is None else acc.restrict(*out)


def scale(m: int, S: WindowSet, out: tuple[int, int] | None = None) -> WindowSet:
    """``m . S = {m s : s in S}``."""
    lo, hi = sorted((m * S.lo, m * S.hi))
    members = [m * v for v in S.members()]
    period = None if S.period is None or m == 0 else S.period * abs(m)
    res = WindowSet.from_members(members, lo, hi, period)
    res = replace(res, clipped=S.clipped)
    return res if out is None else res.restrict(*out)


def filter_above(A: WindowSet, t: int) -> WindowSet:
    """``A_{>t}``: the members exceeding ``t``, in the same window."""
    if t < A.lo:
        return A
    if t >= A.hi:
        return replace(A, bits=0)
    return replace(A, bits=A.bits & ~_mask(t - A.lo + 1))


def window_density(S: WindowSet, n: int) -> Fraction:
    """Exact finite proxy ``|S & [1..n]| / n`` for the upper density."""
    if n < 1 or n > S.hi or S.lo > 1:
        raise WindowError(f"[1, {n}] is not covered by window [{S.lo}, {S.hi}]")
    return Fraction(S.count_between(1, n), n)


def density_proxy(A: WindowSet) -> Fraction:
    """Density used for lemma hypotheses: exact for periodic sets, else the
    fraction of the positive part of the window that ``A`` occupies."""
    if A.period is not None:
        return Fraction(len(A.residues()), A.period)
    lo = max(A.lo, 1)
    if lo > A.hi:
        return Fraction(0)
    return Fraction(A.count_between(lo, A.hi), A.hi - lo + 1)


def lcm_bound(d) -> int:
    """``lcm(1, 2, ..., floor(1/d))`` for a density ``d`` in ``(0, 1]``."""
    d = Fraction(d)
    if not 0 < d <= 1:
        raise MalformedInputError(f"density must lie in (0, 1], got {d}")
    return math.lcm(*range(1, math.floor(1 / d) + 1))


def meets_every_subgroup(A: WindowSet, q_max: int) -> bool:
    """Window-level test that ``A`` contains a positive multiple of every ``q <= q_max``."""
    positive = [v for v in A.members() if v > 0]
    return all(any(v % q == 0 for v in positive) for q in range(1, q_max + 1))


def find_progression(coloring: Coloring, l: int, dense_classes: Iterable[int]) -> int | None:
    """Least ``c >= 1`` such that ``c, 2c, ..., lc`` all lie in the window and
    all carry colours from ``dense_classes``; None if no such ``c`` fits."""
    if l < 1:
        raise MalformedInputError(f"progression length must be >= 1, got {l}")
    dense = set(dense_classes)
    colors = coloring.colors
    for c in range(1, coloring.N // l + 1):
        if all(colors[c * j - 1] in dense for j in range(1, l + 1)):
            return c
    return None


def least_representation(cands: WindowSet, k: int, targets: WindowSet) -> tuple[int, ...] | None:
    """Lexicographically least nondecreasing ``k``-tuple from ``cands`` whose
    sum lies in ``targets``, or None."""
    if k < 1:
        raise MalformedInputError("k must be >= 1")
    if not cands.bits or not targets.bits:
        return None
    cmin, cmax = cands.min(), cands.max()
    # reach[r]: sums of r candidates that the other k - r summands can still
    # carry into targets.
    reach = []
    for r in range(k):
        lo = max(r * cmin, targets.min() - (k - r) * cmax)
        hi = min(r * cmax, targets.max() - (k - r) * cmin)
        if lo > hi:
            return None
        reach.append(iterate(r, cands, (lo, hi)))
    chosen: list[int] = []
    goal = targets
    for pos in range(k):
        rest = reach[k - pos - 1]
        feasible = diffset(goal, rest)
        lo = max(cands.lo, feasible.lo)
        hi = min(cands.hi, feasible.hi)
        if lo > hi:
            return None
        both = cands.restrict(lo, hi).bits & feasible.restrict(lo, hi).bits
        if not both:
            return None
        c = lo + ((both & -both).bit_length() - 1)
        chosen.append(c)
        goal = WindowSet(goal.lo - c, goal.hi - c, goal.bits)
    return tuple(chosen)


@dataclass(frozen=True)
class LemmaReport:
    lemma: str
    params: dict
    verdict: str
    counterexample: int | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (HOLDS, FAILS, INCONCLUSIVE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAILS and self.counterexample is None:
            raise ValueError("a failing report must carry a counterexample")

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "params": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()},
            "verdict": self.verdict,
            "counterexample": self.counterexample,
            "details": self.details,
        }


def _kfold_residues(res: set[int], k: int, q: int) -> set[int]:
    acc = {0}
    for _ in range(k):
        acc = {(s + r) % q for s in acc for r in res}
    return acc


def _diff_residues(res: set[int], n_left: int, n_right: int, q: int) -> set[int]:
    """Residues of ``n_left R - n_right R`` mod ``q``."""
    left = _kfold_residues(res, n_left, q)
    right = _kfold_residues(res, n_right, q)
    return {(a - b) % q for a in left for b in right}


def _hypothesis(A: WindowSet, n: int) -> tuple[Fraction, bool]:
    d = density_proxy(A)
    return d, d > 0 and n >= 2 / d


def _multiples(m: int, lo: int, hi: int) -> range:
    return range(lo + (-lo) % m, hi + 1, m)


def _closest_first(values: Iterable[int]) -> list[int]:
    return sorted(values, key=lambda v: (abs(v), v))


def check_symmetric_lemma(A: WindowSet, n: int, out: tuple[int, int]) -> LemmaReport:
    """Check that ``nA - nA`` coincides with ``m Z`` on ``out`` for some ``m >= 1``.

    ``m`` is taken as the gcd of what was found, and is only accepted when
    ``m Z`` has a nonzero element in ``out``. For periodic ``A`` a mismatch
    is classified against the exact residue answer; otherwise it is
    inconclusive.
    """
    if not A:
        raise MalformedInputError("check_symmetric_lemma needs a nonempty set")
    d, hyp = _hypothesis(A, n)
    params = {"n": n, "window": [out[0], out[1]], "density_proxy": d, "hypothesis_met": hyp}
    nA = iterate(n, A)
    found = diffset(nA, nA, out)
    members = found.members()
    g = math.gcd(*members) if members else 0
    if g and len(_multiples(g, *out)) > 1 and set(members) == set(_multiples(g, *out)):
        return LemmaReport("symmetric", {**params, "m": g}, HOLDS)

    details = {"found_size": len(members), "found_gcd": g}
    if A.period is None:
        return LemmaReport("symmetric", params, INCONCLUSIVE, details=details)
    q = A.period
    truth = _diff_residues(A.residues(), n, n, q)
    g_true = math.gcd(q, *truth)
    subgroup = set(range(0, q, g_true))
    details["true_residues_mod"] = q
    if truth == subgroup:
        details["true_m"] = g_true
        return LemmaReport("symmetric", params, INCONCLUSIVE, details=details)
    # Not a subgroup: some multiple of g_true is never reached.
    witness = next((v for v in _closest_first(range(out[0], out[1] + 1))
                    if v % q in subgroup and v % q not in truth), None)
    if witness is None:
        return LemmaReport("symmetric", params, INCONCLUSIVE, details=details)
    return LemmaReport("symmetric", params, FAILS, witness, details)


def check_translated_lemma(S: WindowSet, n_lo: int, n_hi: int, out: tuple[int, int]) -> LemmaReport:
    """Check that ``S - nS`` restricted to ``out`` is the same for every ``n`` in
    ``[n_lo, n_hi]``. ``S`` must contain 0."""
    if 0 not in S:
        raise MalformedInputError("check_translated_lemma needs 0 in S")
    if not 1 <= n_lo <= n_hi:
        raise MalformedInputError("need 1 <= n_lo <= n_hi")
    d, hyp = _hypothesis(S, n_lo)
    params = {"n_lo": n_lo, "n_hi": n_hi, "window": [out[0], out[1]],
              "density_proxy": d, "hypothesis_met": hyp}
    # S - nS = S + n(-S), so only values that can still reach ``out`` matter.
    neg = negate(S)
    smin, smax = S.min(), S.max()
    prev = None
    for n in range(n_lo, n_hi + 1):
        tail = iterate(n, neg, (out[0] - smax, out[1] - smin))
        cur = sumset(S, tail, out)
        if prev is not None and cur.bits != prev.bits:
            diff = WindowSet(out[0], out[1], cur.bits ^ prev.bits)
            v = _closest_first(diff.members())[0]
            details = {"first_change": n, "size_before": len(prev), "size_after": len(cur)}
            if S.period is not None:
                q = S.period
                res = S.residues()
                before = _diff_residues(res, 1, n - 1, q)
                after = _diff_residues(res, 1, n, q)
                if before != after:
                    return LemmaReport("translated", params, FAILS, v, details)
            details["changed_value"] = v
            return LemmaReport("translated", params, INCONCLUSIVE, details=details)
        prev = cur
    return LemmaReport("translated", params, HOLDS, details={"size": len(prev)})


def check_new_lemma(A: WindowSet, t: int, n: int, m: int, out: tuple[int, int]) -> LemmaReport:
    """Check that every multiple of ``m`` in ``out`` lies in ``A_{>t} - n A_{>t}``.

    The counterexample of a failing report is the least uncovered multiple
    that no periodic extension of ``A`` could cover.
    """
    if m < 1 or n < 1:
        raise MalformedInputError("need m >= 1 and n >= 1")
    d, hyp = _hypothesis(A, n)
    params = {"t": t, "n": n, "m": m, "window": [out[0], out[1]],
              "density_proxy": d, "hypothesis_met": hyp}
    big = filter_above(A, t)
    if not big:
        return LemmaReport("new", params, INCONCLUSIVE, details={"reason": "A_{>t} is empty on the window"})
    neg = negate(big)
    tail = iterate(n, neg, (out[0] - big.max(), out[1] - big.min()))
    covered = sumset(big, tail, out)
    missing = [v for v in _multiples(m, *out) if v not in covered]
    if not missing:
        return LemmaReport("new", params, HOLDS, details={"multiples_checked": len(_multiples(m, *out))})
    details = {"uncovered": len(missing), "least_uncovered": missing[0]}
    if A.period is not None:
        q = A.period
        reachable = _diff_residues(A.residues(), 1, n, q)
        genuine = [v for v in missing if v % q not in reachable]
        if genuine:
            return LemmaReport("new", params, FAILS, genuine[0], details)
    return LemmaReport("new", params, INCONCLUSIVE, details=details)
