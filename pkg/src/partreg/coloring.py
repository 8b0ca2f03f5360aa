"""Finite colourings of ``[1..N]``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import MalformedInputError


@dataclass(frozen=True)
class Coloring:
    """Total map from ``{1, ..., N}`` to colours ``0 .. r-1``."""

    r: int
    colors: tuple[int, ...]

    def __post_init__(self):
        if self.r < 1:
            raise MalformedInputError(f"need at least one colour, got r={self.r}")
        for p, c in enumerate(self.colors, start=1):
            if not 0 <= c < self.r:
                raise MalformedInputError(f"point {p} has colour {c}, outside 0..{self.r - 1}")

    def __repr__(self) -> str:
        shown = self.colors if len(self.colors) <= 32 else self.colors[:32] + ("...",)
        return f"Coloring(r={self.r}, N={self.N}, colors={shown})"

    @property
    def N(self) -> int:
        return len(self.colors)

    def __call__(self, point: int) -> int:
        if not 1 <= point <= len(self.colors):
            raise MalformedInputError(f"point {point} outside the window 1..{self.N}")
        return self.colors[point - 1]

    def color_class(self, color: int) -> list[int]:
        return [p for p, c in enumerate(self.colors, start=1) if c == color]

    def used_colors(self) -> list[int]:
        return sorted(set(self.colors))

    @classmethod
    def constant(cls, N: int) -> Coloring:
        return cls(1, (0,) * N)

    @classmethod
    def residue(cls, modulus: int, N: int) -> Coloring:
        """Colour ``p`` by ``p mod modulus``; ``modulus=2`` is the parity colouring."""
        if modulus < 1:
            raise MalformedInputError("modulus must be >= 1")
        return cls(modulus, tuple(p % modulus for p in range(1, N + 1)))

    @classmethod
    def from_function(cls, r: int, N: int, fn) -> Coloring:
        return cls(r, tuple(fn(p) for p in range(1, N + 1)))

    @classmethod
    def from_classes(cls, classes: Sequence[Iterable[int]], N: int) -> Coloring:
        colors = [-1] * N
        for c, members in enumerate(classes):
            for p in members:
                colors[p - 1] = c
        if -1 in colors:
            raise MalformedInputError(f"point {colors.index(-1) + 1} has no colour")
        return cls(len(classes), tuple(colors))

    def to_json(self) -> dict:
        return {"r": self.r, "colors": list(self.colors)}

    @classmethod
    def from_json(cls, doc: Mapping, N: int | None = None) -> Coloring:
        """Parse ``{"r", "colors"}`` or the ``{"rule": "residue", "modulus"}`` shorthand.

        The shorthand needs the window size ``N`` from the caller.
        """
        if "colors" in doc:
            colors = tuple(int(c) for c in doc["colors"])
            r = int(doc.get("r", max(colors, default=0) + 1))
            return cls(r, colors)
        if doc.get("rule") == "residue":
            if N is None:
                raise MalformedInputError("residue colouring needs an explicit window size")
            return cls.residue(int(doc["modulus"]), N)
        raise MalformedInputError("colouring document needs 'colors' or rule='residue'")
