"""Finite truncations of the linear systems studied here.

Every generator returns a :class:`LinearSystem`: a sparse integer matrix, an
ordered list of variable names and a mode. In *image* mode each row is an
expression whose value must be a positive integer of the common colour; in
*kernel* mode each row is an equation ``row . x = 0`` and the variables are
coloured.

Kernel equations are stored as left-hand side minus right-hand side, so
``u_1 = x_11`` becomes the row ``u_1 - x_11``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import MalformedInputError
from .matrix import SparseIntMatrix, evaluate_image

IMAGE = "image"
KERNEL = "kernel"

_KIND_RANK = {"y": 0, "x": 1, "u": 2, "v": 3, "z": 4, "xtilde": 5}
_NAME_RE = re.compile(r"^(y|x|u|v|z|xtilde)(?:_(\d+))?(?:_(\d+))?$")


@dataclass(frozen=True)
class VarName:
    """A structured variable name such as ``x_3_2`` or ``u_4``."""

    kind: str
    n: int | None = None
    i: int | None = None

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise MalformedInputError(f"unknown variable kind {self.kind!r}")
        if self.kind == "y":
            if self.n is not None or self.i is not None:
                raise MalformedInputError("y takes no indices")
        elif self.kind in ("u", "z"):
            if self.n is None or self.n < 1 or self.i is not None:
                raise MalformedInputError(f"{self.kind} needs one index n >= 1")
        else:
            if self.n is None or self.i is None or self.n < 1 or not 1 <= self.i <= self.n:
                raise MalformedInputError(f"{self.kind} needs indices n >= 1, 1 <= i <= n")

    def __str__(self) -> str:
        parts = [self.kind] + [str(k) for k in (self.n, self.i) if k is not None]
        return "_".join(parts)

    @classmethod
    def parse(cls, name: str) -> VarName:
        m = _NAME_RE.match(name)
        if not m:
            raise MalformedInputError(f"not a structured variable name: {name!r}")
        kind, n, i = m.groups()
        return cls(kind, None if n is None else int(n), None if i is None else int(i))

    def sort_key(self) -> tuple[int, int, int]:
        return (_KIND_RANK[self.kind], self.n or 0, self.i or 0)


Y = VarName("y")


def x(n: int, i: int) -> VarName:
    return VarName("x", n, i)


def xt(n: int, i: int) -> VarName:
    return VarName("xtilde", n, i)


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple[str, ...]
    matrix: SparseIntMatrix
    mode: str
    coeffs: tuple[int, ...] = ()
    blocks: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.mode not in (IMAGE, KERNEL):
            raise MalformedInputError(f"mode must be 'image' or 'kernel', got {self.mode!r}")
        if len(self.variables) != self.matrix.n_cols:
            raise MalformedInputError(
                f"{len(self.variables)} variable names for {self.matrix.n_cols} columns")
        if len(set(self.variables)) != len(self.variables):
            raise MalformedInputError("duplicate variable names")

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def index(self, name) -> int:
        return self.variables.index(str(name))

    def vector(self, assignment: Mapping) -> list[int]:
        """Order a name -> value mapping by the system's variables."""
        values = {str(k): v for k, v in assignment.items()}
        try:
            return [int(values[name]) for name in self.variables]
        except KeyError as exc:
            raise MalformedInputError(f"assignment is missing variable {exc.args[0]}") from None

    def evaluate(self, assignment: Mapping) -> tuple[int, ...]:
        return evaluate_image(self.matrix, self.vector(assignment))

    def to_json(self) -> dict:
        doc = self.matrix.to_json()
        doc["variables"] = list(self.variables)
        doc["mode"] = self.mode
        if self.coeffs:
            doc["coeffs"] = [str(c) for c in self.coeffs]
        if self.blocks:
            doc["blocks"] = list(self.blocks)
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> LinearSystem:
        matrix = SparseIntMatrix.from_json(doc)
        variables = doc.get("variables")
        if variables is None:
            variables = [f"w{k + 1}" for k in range(matrix.n_cols)]
        mode = doc.get("mode", IMAGE)
        coeffs = tuple(int(c) for c in doc.get("coeffs", ()))
        blocks = tuple(int(b) for b in doc.get("blocks", ()))
        return cls(tuple(str(v) for v in variables), matrix, mode, coeffs, blocks)


def _check_args(n_max: int, a: Sequence[int]) -> tuple[int, ...]:
    if n_max < 1:
        raise MalformedInputError(f"truncation depth must be >= 1, got {n_max}")
    if len(a) < n_max:
        raise MalformedInputError(f"need {n_max} coefficients, got {len(a)}")
    return tuple(int(c) for c in a[:n_max])


def _block_sizes(n_max: int, schedule: str) -> tuple[int, ...]:
    if schedule == "linear":
        return tuple(range(1, n_max + 1))
    if schedule == "pow2":
        return tuple(2 ** k for k in range(1, n_max + 1))
    raise MalformedInputError(f"unknown block schedule {schedule!r}")


def _build(variables: Sequence[VarName | str], rows, mode, coeffs=(), blocks=()) -> LinearSystem:
    names = tuple(str(v) for v in variables)
    where = {name: k for k, name in enumerate(names)}
    matrix = SparseIntMatrix.from_rows(
        len(names), ([(where[str(v)], c) for v, c in row] for row in rows))
    return LinearSystem(names, matrix, mode, tuple(coeffs), tuple(blocks))


def gen_dh_truncation(n_max: int, a: Sequence[int], schedule: str = "linear") -> LinearSystem:
    """Image system: for each block, the block sum then ``x_ni + a_n y``; last row ``y``.

    ``schedule="linear"`` uses block sizes 1, 2, ..., n_max. ``"pow2"`` uses
    sizes 2, 4, ..., 2**n_max, the block pattern of the De-Hindman matrix;
    block ``k`` still takes coefficient ``a[k-1]`` and its variables are
    named ``x_<size>_<i>``.
    """
    coeffs = _check_args(n_max, a)
    sizes = _block_sizes(n_max, schedule)
    variables = [Y] + [x(s, i) for s in sizes for i in range(1, s + 1)]
    rows = []
    for s, c in zip(sizes, coeffs):
        rows.append([(x(s, i), 1) for i in range(1, s + 1)])
        rows.extend([(x(s, i), 1), (Y, c)] for i in range(1, s + 1))
    rows.append([(Y, 1)])
    return _build(variables, rows, IMAGE, coeffs, sizes)


def gen_bhl_kernel(n_max: int, a: Sequence[int]) -> LinearSystem:
    """Kernel system ``x_n1 + ... + x_nn + a_n y - z_n = 0`` for n <= n_max."""
    coeffs = _check_args(n_max, a)
    ns = range(1, n_max + 1)
    variables = [Y] + [x(n, i) for n in ns for i in range(1, n + 1)] + [VarName("z", n) for n in ns]
    rows = [[(x(n, i), 1) for i in range(1, n + 1)] + [(Y, coeffs[n - 1]), (VarName("z", n), -1)]
            for n in ns]
    return _build(variables, rows, KERNEL, coeffs, tuple(ns))


def gen_nearmiss_kernel(n_max: int, a: Sequence[int]) -> LinearSystem:
    """Kernel system ``xt_n1 + ... + xt_nn - n a_n y - z_n = 0`` for n <= n_max."""
    coeffs = _check_args(n_max, a)
    ns = range(1, n_max + 1)
    variables = [Y] + [VarName("z", n) for n in ns] + [xt(n, i) for n in ns for i in range(1, n + 1)]
    rows = [[(xt(n, i), 1) for i in range(1, n + 1)] + [(Y, -n * coeffs[n - 1]), (VarName("z", n), -1)]
            for n in ns]
    return _build(variables, rows, KERNEL, coeffs, tuple(ns))


def gen_finite_system(N: int, a: Sequence[int]) -> LinearSystem:
    """Kernel system ``u_n = sum_i x_ni``, ``v_ni = x_ni + a_n y`` for n <= N.

    Rows come in the same order as the first rows of ``gen_dh_truncation``
    (block sum, then one row per ``x_ni``), and the ``u``/``v`` columns are
    ordered to match the rows. The matrix is therefore exactly ``(-B | I)``
    where ``B`` is the top-left corner of the truncation matrix.
    """
    coeffs = _check_args(N, a)
    ns = range(1, N + 1)
    xs = [x(n, i) for n in ns for i in range(1, n + 1)]
    images: list[VarName] = []
    rows = []
    for n in ns:
        u = VarName("u", n)
        images.append(u)
        rows.append([(u, 1)] + [(x(n, i), -1) for i in range(1, n + 1)])
        for i in range(1, n + 1):
            v = VarName("v", n, i)
            images.append(v)
            rows.append([(v, 1), (x(n, i), -1), (Y, -coeffs[n - 1])])
    return _build([Y] + xs + images, rows, KERNEL, coeffs, tuple(ns))


def image_system(rows: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> LinearSystem:
    """Image system from dense rows, with generic variable names by default."""
    matrix = SparseIntMatrix.from_dense(rows)
    if names is None:
        names = [f"w{k + 1}" for k in range(matrix.n_cols)]
    return LinearSystem(tuple(names), matrix, IMAGE)


def kernel_system(rows: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> LinearSystem:
    matrix = SparseIntMatrix.from_dense(rows)
    if names is None:
        names = [f"w{k + 1}" for k in range(matrix.n_cols)]
    return LinearSystem(tuple(names), matrix, KERNEL)


def schur_system() -> LinearSystem:
    """The expressions ``s, t, s + t``."""
    return image_system([[1, 0], [0, 1], [1, 1]], ["s", "t"])


def ap3_system() -> LinearSystem:
    """Three-term progressions ``b, b + d, b + 2d`` with ``d >= 1``."""
    return image_system([[1, 0], [1, 1], [1, 2]], ["b", "d"])


@dataclass(frozen=True)
class NearMissImage:
    """Result of mapping a near-miss kernel witness onto the truncated image system."""

    system: LinearSystem
    assignment: dict[str, int]
    image: tuple[int, ...]
    positive: dict[str, bool]

    @property
    def all_positive(self) -> bool:
        return all(self.positive.values())


def transform_nearmiss(sol: Mapping, a: Sequence[int]) -> NearMissImage:
    """Set ``x_ni = xt_ni - a_n y`` for a witness of :func:`gen_nearmiss_kernel`.

    ``sol`` maps variable names (strings or :class:`VarName`) to integers and
    must satisfy the near-miss equations exactly. The depth is read off the
    ``z_n`` entries. The returned image lists the values of the
    ``gen_dh_truncation`` rows, which are ``z_n``, then ``xt_ni``, per block,
    then ``y``.
    """
    values = {str(k): int(v) for k, v in sol.items()}
    zs = sorted(VarName.parse(k).n for k in values if k.startswith("z_"))
    if not zs or zs != list(range(1, len(zs) + 1)):
        raise MalformedInputError("witness must contain z_1, ..., z_n with no gaps")
    n_max = zs[-1]
    kernel = gen_nearmiss_kernel(n_max, a)
    vec = kernel.vector(values)
    residual = evaluate_image(kernel.matrix, vec)
    if any(residual):
        bad = next(k for k, r in enumerate(residual) if r)
        raise MalformedInputError(f"not a near-miss witness: equation {bad + 1} has residual {residual[bad]}")

    target = gen_dh_truncation(n_max, a)
    y = values["y"]
    assignment = {"y": y}
    for n in range(1, n_max + 1):
        for i in range(1, n + 1):
            assignment[str(x(n, i))] = values[str(xt(n, i))] - kernel.coeffs[n - 1] * y
    positive = {name: v >= 1 for name, v in assignment.items()}
    return NearMissImage(target, assignment, target.evaluate(assignment), positive)
