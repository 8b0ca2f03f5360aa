"""Sparse integer matrices, exact rational spans and Rado's columns property.

Columns are 0-based inside Python objects and 1-based in every JSON document
(``to_json`` / ``from_json``), matching the usual ``[n] = {1, ..., n}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import DimensionError, MalformedInputError, TooLargeError

RationalVector = tuple[Fraction, ...]

DEFAULT_MAX_COLS = 16


def rational_vector(entries: Iterable) -> RationalVector:
    """Coerce ints, strings or fractions into an exact rational vector."""
    return tuple(Fraction(e) for e in entries)


@dataclass(frozen=True)
class SparseIntMatrix:
    """Integer matrix stored row by row as ``(col, coeff)`` pairs.

    Within a row the column indices are strictly increasing and no zero
    coefficient is stored; both invariants are checked on construction.
    """

    n_rows: int
    n_cols: int
    rows: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise MalformedInputError("matrix dimensions must be non-negative")
        if len(self.rows) != self.n_rows:
            raise MalformedInputError(
                f"expected {self.n_rows} rows, got {len(self.rows)}")
        for r, row in enumerate(self.rows):
            prev = -1
            for col, coeff in row:
                if not isinstance(col, int) or not isinstance(coeff, int):
                    raise MalformedInputError(f"row {r}: entries must be integers")
                if not 0 <= col < self.n_cols:
                    raise MalformedInputError(f"row {r}: column {col} out of range")
                if col <= prev:
                    raise MalformedInputError(f"row {r}: columns not strictly increasing")
                if coeff == 0:
                    raise MalformedInputError(f"row {r}: stored zero coefficient")
                prev = col

    @classmethod
    def from_rows(cls, n_cols: int, rows: Iterable[Iterable[tuple[int, int]]]) -> SparseIntMatrix:
        """Build from unsorted sparse rows; duplicate columns are summed, zeros dropped."""
        built = []
        for row in rows:
            acc: dict[int, int] = {}
            for col, coeff in row:
                acc[col] = acc.get(col, 0) + int(coeff)
            built.append(tuple((c, v) for c, v in sorted(acc.items()) if v != 0))
        return cls(len(built), n_cols, tuple(built))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], n_cols: int | None = None) -> SparseIntMatrix:
        if n_cols is None:
            n_cols = len(dense[0]) if dense else 0
        for row in dense:
            if len(row) != n_cols:
                raise DimensionError("ragged dense matrix")
        return cls.from_rows(n_cols, (enumerate(row) for row in dense))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for r, row in enumerate(self.rows):
            for col, coeff in row:
                out[r][col] = coeff
        return out

    def columns(self) -> list[tuple[int, ...]]:
        cols = [[0] * self.n_rows for _ in range(self.n_cols)]
        for r, row in enumerate(self.rows):
            for col, coeff in row:
                cols[col][r] = coeff
        return [tuple(c) for c in cols]

    def column(self, j: int) -> tuple[int, ...]:
        if not 0 <= j < self.n_cols:
            raise MalformedInputError(f"column {j} out of range")
        return tuple(dict(row).get(j, 0) for row in self.rows)

    def select_columns(self, cols: Sequence[int]) -> SparseIntMatrix:
        """Matrix formed by the given columns, in the given order."""
        where = {c: k for k, c in enumerate(cols)}
        return SparseIntMatrix.from_rows(
            len(cols), ([(where[c], v) for c, v in row if c in where] for row in self.rows))

    def negate(self) -> SparseIntMatrix:
        return SparseIntMatrix(self.n_rows, self.n_cols,
                               tuple(tuple((c, -v) for c, v in row) for row in self.rows))

    def to_json(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "n_cols": self.n_cols,
            "rows": [[[c + 1, str(v)] for c, v in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, doc: dict) -> SparseIntMatrix:
        try:
            n_rows, n_cols, rows = int(doc["n_rows"]), int(doc["n_cols"]), doc["rows"]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"matrix document: missing or bad field ({exc})") from None
        if len(rows) != n_rows:
            raise MalformedInputError(f"matrix document: n_rows={n_rows} but {len(rows)} rows")
        parsed = []
        for r, row in enumerate(rows):
            entries = []
            for k, entry in enumerate(row):
                try:
                    col, coeff = entry
                    entries.append((int(col) - 1, int(coeff)))
                except (TypeError, ValueError):
                    raise MalformedInputError(
                        f"matrix document: rows[{r}][{k}] is not a [col, coeff] pair") from None
            parsed.append(tuple(entries))
        return cls(n_rows, n_cols, tuple(parsed))


@dataclass(frozen=True)
class ColumnsCertificate:
    """Ordered partition ``I_1, ..., I_t`` of the column indices (0-based)."""

    blocks: tuple[tuple[int, ...], ...]

    def one_based(self) -> list[list[int]]:
        return [[c + 1 for c in block] for block in self.blocks]

    def to_json(self) -> dict:
        return {"partition": self.one_based()}

    @classmethod
    def from_one_based(cls, blocks: Iterable[Iterable[int]]) -> ColumnsCertificate:
        return cls(tuple(tuple(sorted(int(c) - 1 for c in block)) for block in blocks))


class _Echelon:
    """Incrementally maintained row echelon basis over the rationals."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[tuple[int, list[Fraction]]] = []

    def reduce(self, v: Sequence) -> list[Fraction]:
        w = [Fraction(x) for x in v]
        for pivot, row in self.rows:
            f = w[pivot]
            if f:
                for k in range(self.dim):
                    if row[k]:
                        w[k] -= f * row[k]
        return w

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; return False when it was already in the span."""
        w = self.reduce(v)
        for pivot, x in enumerate(w):
            if x:
                self.rows.append((pivot, [e / x for e in w]))
                return True
        return False


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    """Decide exactly whether ``v`` is a rational combination of ``basis``.

    The zero vector lies in every span, including the empty one.
    """
    dim = len(v)
    for b in basis:
        if len(b) != dim:
            raise DimensionError(f"basis vector of length {len(b)}, expected {dim}")
    ech = _Echelon(dim)
    for b in basis:
        ech.add(b)
    return ech.contains(v)


def _vsum(cols: Sequence[tuple[int, ...]], idx: Iterable[int], dim: int) -> list[int]:
    acc = [0] * dim
    for j in idx:
        for k, x in enumerate(cols[j]):
            acc[k] += x
    return acc


def _zero_sum_subsets(cols: Sequence[tuple[int, ...]], dim: int) -> Iterator[tuple[int, ...]]:
    # Depth-first over sorted index tuples gives lexicographic order:
    # (0,), (0, 1), (0, 1, 2), ..., (0, 2), ..., (1,), ...
    n = len(cols)

    def rec(start: int, prefix: tuple[int, ...], acc: list[int]):
        for i in range(start, n):
            nxt = [a + b for a, b in zip(acc, cols[i])]
            t = prefix + (i,)
            if not any(nxt):
                yield t
            yield from rec(i + 1, t, nxt)

    yield from rec(0, (), [0] * dim)


def columns_property(A: SparseIntMatrix, max_cols: int = DEFAULT_MAX_COLS) -> ColumnsCertificate | None:
    """Search for a columns-property certificate of ``A``.

    ``I_1`` is the lexicographically least zero-sum set of columns. Each
    later block is the largest (then lexicographically least) set of unused
    columns whose sum lies in the span of the columns used so far.

    Returns None when ``A`` does not have the columns property.

    Raises
    ------
    TooLargeError
        If ``A.n_cols > max_cols``; the search is exponential in the
        number of columns.
    """
    if A.n_cols > max_cols:
        raise TooLargeError(
            f"columns_property: {A.n_cols} columns exceeds enumeration bound {max_cols}")
    if A.n_cols == 0:
        return None
    cols = A.columns()
    dim = A.n_rows
    first = next(_zero_sum_subsets(cols, dim), None)
    if first is None:
        return None
    # Any zero-sum first block extends to a certificate if some certificate
    # exists, and adding columns to the used set never shrinks the set of
    # admissible next blocks. So the greedy pass from the first candidate
    # decides the property; no backtracking is needed.
    blocks = [first]
    ech = _Echelon(dim)
    for j in first:
        ech.add(cols[j])
    remaining = [j for j in range(A.n_cols) if j not in set(first)]
    while remaining:
        block = _next_block(cols, remaining, ech, dim)
        if block is None:
            return None
        blocks.append(block)
        for j in block:
            ech.add(cols[j])
        taken = set(block)
        remaining = [j for j in remaining if j not in taken]
    return ColumnsCertificate(tuple(blocks))


def _next_block(cols, remaining, ech: _Echelon, dim: int) -> tuple[int, ...] | None:
    for size in range(len(remaining), 0, -1):
        for cand in combinations(remaining, size):
            if ech.contains(_vsum(cols, cand, dim)):
                return cand
    return None


def verify_certificate(A: SparseIntMatrix, cert: ColumnsCertificate) -> bool:
    """Check both columns-property conditions for ``cert`` directly.

    Raises MalformedInputError when the blocks are empty, overlap, leave a
    column uncovered, or name a column outside ``A``.
    """
    seen: set[int] = set()
    for block in cert.blocks:
        if not block:
            raise MalformedInputError("certificate contains an empty block")
        for j in block:
            if not 0 <= j < A.n_cols:
                raise MalformedInputError(f"certificate column {j + 1} out of range 1..{A.n_cols}")
            if j in seen:
                raise MalformedInputError(f"certificate column {j + 1} appears twice")
            seen.add(j)
    if len(seen) != A.n_cols:
        missing = sorted(set(range(A.n_cols)) - seen)
        raise MalformedInputError(
            f"certificate does not cover columns {[j + 1 for j in missing]}")

    cols = A.columns()
    dim = A.n_rows
    if any(_vsum(cols, cert.blocks[0], dim)):
        return False
    used: list[tuple[int, ...]] = [cols[j] for j in cert.blocks[0]]
    for block in cert.blocks[1:]:
        if not in_span(_vsum(cols, block, dim), used):
            return False
        used.extend(cols[j] for j in block)
    return True


def evaluate_image(A: SparseIntMatrix, x: Sequence[int]) -> tuple[int, ...]:
    """Exact product ``A @ x`` over Python integers."""
    if len(x) != A.n_cols:
        raise DimensionError(f"vector of length {len(x)}, matrix has {A.n_cols} columns")
    return tuple(sum(coeff * x[col] for col, coeff in row) for row in A.rows)
