"""Exact arithmetic for the modular group and its upper half-plane action.

Group elements are 2x2 integer matrices of determinant one kept as Python
integers, so coset enumeration and word problems never overflow.  Points on
the upper half-plane carry double precision, which is enough for the 1e-10
tolerances used throughout the package.  Boundary points (candidate cusps)
are exact rationals or the symbol oo.

The argument convention is arg(w) in (-pi, pi], with the branch value at the
negative real axis mapped to +pi.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

__all__ = [
    "GroupElement",
    "UHPoint",
    "BoundaryPoint",
    "IDENTITY",
    "NEG_IDENTITY",
    "S",
    "T",
    "generators",
    "arg_principal",
    "apply_moebius",
    "apply_moebius_boundary",
    "automorphy_phase",
    "slash",
    "as_complex",
]


@dataclass(frozen=True)
class GroupElement:
    """Integer matrix [[a, b], [c, d]] with a*d - b*c = 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(
                f"matrix [[{self.a},{self.b}],[{self.c},{self.d}]] has determinant != 1"
            )

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inv() ** (-n)
        result = IDENTITY
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def moebius(self, z: complex) -> complex:
        """Fractional linear action on a point of the open upper half-plane."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    @property
    def bottom_row(self) -> tuple[int, int]:
        return (self.c, self.d)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = GroupElement(1, 0, 0, 1)
NEG_IDENTITY = GroupElement(-1, 0, 0, -1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)


def generators() -> tuple[GroupElement, GroupElement]:
    """The standard generators: the inversion S and the unit translation T."""
    return S, T


@dataclass(frozen=True)
class UHPoint:
    """Point x + iy of the open upper half-plane; construction rejects y <= 0."""

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"imaginary part must be positive, got {self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "UHPoint":
        return cls(z.real, z.imag)


def as_complex(z) -> complex:
    """Accept UHPoint or a plain complex number with positive imaginary part."""
    if isinstance(z, UHPoint):
        return z.z
    return complex(z)


@dataclass(frozen=True)
class BoundaryPoint:
    """A rational boundary point in lowest terms, or the point at infinity.

    ``value`` is ``None`` for infinity.  The sort key (denominator, numerator)
    places infinity (treated as 1/0) before every rational.
    """

    value: Fraction | None

    @classmethod
    def infinity(cls) -> "BoundaryPoint":
        return cls(None)

    @classmethod
    def rational(cls, num, den=1) -> "BoundaryPoint":
        return cls(Fraction(num, den))

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    @property
    def numerator(self) -> int:
        return 1 if self.value is None else self.value.numerator

    @property
    def denominator(self) -> int:
        return 0 if self.value is None else self.value.denominator

    def sort_key(self) -> tuple[int, int]:
        return (self.denominator, self.numerator)

    def __repr__(self) -> str:
        return "oo" if self.value is None else str(self.value)


INFINITY = BoundaryPoint.infinity()


def arg_principal(w: complex) -> float:
    """Argument in (-pi, pi]; the negative real axis gets +pi."""
    if w == 0:
        raise ValueError("argument of zero is undefined")
    if w.imag == 0.0 and w.real < 0:
        return math.pi
    a = cmath.phase(w)
    if a == -math.pi:
        return math.pi
    return a


def apply_moebius(g: GroupElement, z) -> UHPoint:
    """Act by (az+b)/(cz+d); the image has Im = Im(z)/|cz+d|^2."""
    w = g.moebius(as_complex(z))
    return UHPoint(w.real, w.imag)


def apply_moebius_boundary(g: GroupElement, q: BoundaryPoint) -> BoundaryPoint:
    """Boundary action: oo -> a/c (oo when c = 0), -d/c -> oo, rationals exact."""
    if q.is_infinity:
        if g.c == 0:
            return INFINITY
        return BoundaryPoint(Fraction(g.a, g.c))
    t = q.value
    den = g.c * t + g.d
    if den == 0:
        return INFINITY
    return BoundaryPoint((g.a * t + g.b) / den)


def automorphy_phase(g: GroupElement, z, k: complex) -> complex:
    """The factor e^{i k arg(cz+d)} under the (-pi, pi] convention."""
    w = g.c * as_complex(z) + g.d
    return cmath.exp(1j * complex(k) * arg_principal(w))


def slash(f: Callable[[complex], complex], k: complex, g: GroupElement) -> Callable[[complex], complex]:
    """Weight-k slash: z -> e^{-ik arg(cz+d)} f(gz)."""

    def slashed(z):
        zc = as_complex(z)
        w = g.c * zc + g.d
        return cmath.exp(-1j * complex(k) * arg_principal(w)) * f(g.moebius(zc))

    return slashed
