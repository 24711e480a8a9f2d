"""Exact vectors over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Union

Scalar = Union[int, Fraction]


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # floats are accepted but converted exactly; callers wanting a decimal
        # literal should pass a string
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


class RationalVector:
    """Immutable vector with Fraction coordinates.

    All arithmetic is exact. Supports +, -, unary -, and scalar
    multiplication by ints or Fractions.
    """

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        object.__setattr__(self, "coords", tuple(_to_fraction(c) for c in coords))

    def __setattr__(self, name, value):
        raise AttributeError("RationalVector is immutable")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def __add__(self, other: "RationalVector") -> "RationalVector":
        self._check_dim(other)
        return RationalVector(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "RationalVector") -> "RationalVector":
        self._check_dim(other)
        return RationalVector(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "RationalVector":
        return RationalVector(-a for a in self.coords)

    def __mul__(self, s: Scalar) -> "RationalVector":
        s = _to_fraction(s)
        return RationalVector(s * a for a in self.coords)

    __rmul__ = __mul__

    def dot(self, other: "RationalVector") -> Fraction:
        self._check_dim(other)
        return sum((a * b for a, b in zip(self.coords, other.coords)), Fraction(0))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def _check_dim(self, other: "RationalVector") -> None:
        if len(self.coords) != len(other.coords):
            raise ValueError("dimension mismatch")

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalVector) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"RationalVector({', '.join(str(c) for c in self.coords)})"

    @staticmethod
    def zero(dim: int) -> "RationalVector":
        return RationalVector([0] * dim)
