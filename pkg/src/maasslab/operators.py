"""Weight-k Laplacian and raising/lowering operators.

Two representations live side by side: finite-difference stencils acting on
arbitrary smooth evaluators, and exact shift rules on the Whittaker basis
terms of a cusp expansion.  The exact rules are ground truth; the stencils
validate them and handle evaluators with no closed rule (truncated series).

Stencils: fourth-order central differences for second derivatives,
second-order for first derivatives.  Steps are clamped to y/4 so they never
cross the real axis.

The basis rules were pinned against high-precision finite differences; for
negative frequencies the Whittaker argument is always the positive quantity
4 pi |n| y / width (printed sign conventions differ between sources), and the
raising rule on the growing family carries the factor -(k(k+2)/2 + 2 lambda),
which is forced by composing with the Laplacian factorization.
"""

from __future__ import annotations

import cmath
import os
from dataclasses import dataclass
from typing import Callable, Iterable

from .modgroup import GroupElement, arg_principal, as_complex, slash
from .whittaker import WhittakerParams, normalized_M, normalized_W

__all__ = [
    "SmoothEvaluator",
    "BasisTerm",
    "LemmaConditionError",
    "laplacian_fd",
    "maass_fd",
    "maass_on_basis",
    "basis_evaluator",
    "verify_factorization",
    "verify_slash_commutation",
]


class LemmaConditionError(ValueError):
    """A parameter hypothesis of a basis shift rule is violated."""


@dataclass(frozen=True)
class SmoothEvaluator:
    """A function on the upper half-plane with optional spectral metadata."""

    fn: Callable[[complex], complex]
    weight: complex | None = None
    nu: complex | None = None

    def __call__(self, z) -> complex:
        return self.fn(as_complex(z))


def _clamped(h: float, y: float) -> float:
    return min(h, y / 4.0)


def _dx(u, z: complex, h: float) -> complex:
    return (u(z + h) - u(z - h)) / (2 * h)


def _dy(u, z: complex, h: float) -> complex:
    return (u(z + 1j * h) - u(z - 1j * h)) / (2 * h)


def _dxx(u, z: complex, h: float) -> complex:
    return (
        -u(z + 2 * h) + 16 * u(z + h) - 30 * u(z) + 16 * u(z - h) - u(z - 2 * h)
    ) / (12 * h * h)


def _dyy(u, z: complex, h: float) -> complex:
    return (
        -u(z + 2j * h) + 16 * u(z + 1j * h) - 30 * u(z) + 16 * u(z - 1j * h) - u(z - 2j * h)
    ) / (12 * h * h)


def laplacian_fd(u, k: complex, z, h: float) -> complex:
    """Stencil approximation of -y^2 (d_xx + d_yy) + i k y d_x at z."""
    zc = as_complex(z)
    y = zc.imag
    hh = _clamped(h, y)
    return -y * y * (_dxx(u, zc, hh) + _dyy(u, zc, hh)) + 1j * complex(k) * y * _dx(u, zc, hh)


def maass_fd(direction: str, u, k: complex, z, h: float) -> complex:
    """Stencil approximation of the raising (up) or lowering (down) operator."""
    zc = as_complex(z)
    y = zc.imag
    hh = _clamped(h, y)
    sign = 1.0 if direction == "up" else -1.0
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    return sign * 2j * y * _dx(u, zc, hh) + 2 * y * _dy(u, zc, hh) + sign * complex(k) * u(zc)


@dataclass(frozen=True)
class BasisTerm:
    """One term of a cusp expansion: F(scale * y) * e^{i sign * scale/2 * x}.

    ``scale`` is 4 pi |n| / width, so the plane-wave frequency in x is
    sign * scale / 2 = 2 pi n / width.  ``family`` selects the decaying
    ("W") or growing ("M") modified Whittaker profile with first index
    sign * k / 2 and second index nu.
    """

    sign: int
    n: float
    nu: complex
    k: complex
    family: str  # "W" | "M"
    scale: float

    def __post_init__(self):
        if self.family not in ("W", "M"):
            raise ValueError("family must be 'W' or 'M'")
        if self.n == 0:
            raise ValueError("frequency must be nonzero")
        if self.sign != (1 if self.n > 0 else -1):
            raise ValueError("sign field must match the sign of the frequency")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @classmethod
    def from_frequency(cls, n: float, nu: complex, weight: complex, family: str, width: float = 1.0):
        sgn = 1 if n > 0 else -1
        import math

        return cls(
            sign=sgn,
            n=float(n),
            nu=complex(nu),
            k=complex(weight),
            family=family,
            scale=4 * math.pi * abs(n) / width,
        )


def basis_evaluator(t: BasisTerm) -> SmoothEvaluator:
    """The term as a half-plane evaluator."""
    profile = normalized_W if t.family == "W" else normalized_M
    params = WhittakerParams(t.sign * t.k / 2.0, t.nu)
    alpha = t.sign * t.scale / 2.0

    def fn(z: complex) -> complex:
        return profile(params, t.scale * z.imag).value * cmath.exp(1j * alpha * z.real)

    return SmoothEvaluator(fn=fn, weight=t.k, nu=t.nu)


_MUTATION_ENV = "MAASSLAB_MUTATE"


def _mutate(name: str, value: complex) -> complex:
    # harness self-test hook: deliberately corrupt one named shift constant
    if os.environ.get(_MUTATION_ENV, "") == name:
        return value * 1.25
    return value


def _check_shift_conditions(k: complex, nu: complex):
    for signed in (k + nu, k - nu):
        frac = (signed - 0.5).real - round((signed - 0.5).real)
        if abs(signed.imag) < 1e-9 and abs(frac) < 1e-9:
            raise LemmaConditionError(
                f"shift rule requires k +- nu not in 1/2 + Z, got k={k}, nu={nu}"
            )


def maass_on_basis(t: BasisTerm, direction: str) -> tuple[BasisTerm, complex]:
    """Exact action of the raising/lowering operators on a basis term.

    Returns the term with weight shifted by +-2 (same frequency, same second
    index, same family) and the scalar in front of it.
    """
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    _check_shift_conditions(t.k, t.nu)
    k = t.k
    lam = 0.25 - t.nu * t.nu
    up = direction == "up"
    if t.family == "W":
        if t.sign > 0:
            factor = _mutate("wtilde-up", -2.0 + 0j) if up else k * (k - 2) / 2 + 2 * lam
        else:
            factor = k * (k + 2) / 2 + 2 * lam if up else -2.0 + 0j
    else:
        if t.sign > 0:
            factor = -(k * (k + 2) / 2 + 2 * lam) if up else 2.0 + 0j
        else:
            factor = 2.0 + 0j if up else -(k * (k - 2) / 2 + 2 * lam)
    k2 = k + 2 if up else k - 2
    shifted = BasisTerm(sign=t.sign, n=t.n, nu=t.nu, k=k2, family=t.family, scale=t.scale)
    return shifted, complex(factor)


def verify_factorization(u, k: complex, samples: Iterable, h: float) -> tuple[float, float]:
    """Residuals of both Laplacian factorizations through the ladder operators.

    Checks Delta_k u against -1/4 E+_{k-2} E-_k u - k(k-2)/4 u and against
    -1/4 E-_{k+2} E+_k u - k(k+2)/4 u; returns the two max residuals.
    """
    k = complex(k)

    def lower(z):
        return maass_fd("down", u, k, z, h)

    def raise_(z):
        return maass_fd("up", u, k, z, h)

    res_pm = 0.0
    res_mp = 0.0
    for z in samples:
        zc = as_complex(z)
        lap = laplacian_fd(u, k, zc, h)
        comp1 = -0.25 * maass_fd("up", lower, k - 2, zc, h) - k * (k - 2) / 4 * u(zc)
        comp2 = -0.25 * maass_fd("down", raise_, k + 2, zc, h) - k * (k + 2) / 4 * u(zc)
        res_pm = max(res_pm, abs(lap - comp1))
        res_mp = max(res_mp, abs(lap - comp2))
    return res_pm, res_mp


def verify_slash_commutation(
    u, k: complex, g: GroupElement, samples: Iterable, h: float
) -> tuple[float, float, float]:
    """Residuals of commuting the slash action past the Laplacian and ladders.

    Returns max residuals of Delta_k(u|_k g) - (Delta_k u)|_k g and of
    E+-_k(u|_k g) - (E+-_k u)|_{k+-2} g over the samples.
    """
    k = complex(k)
    u_fn = u if callable(u) else u.fn
    slashed = slash(u_fn, k, g)

    def lap_of_u(z):
        return laplacian_fd(u, k, z, h)

    def up_of_u(z):
        return maass_fd("up", u, k, z, h)

    def down_of_u(z):
        return maass_fd("down", u, k, z, h)

    lap_slashed = slash(lap_of_u, k, g)
    up_slashed = slash(up_of_u, k + 2, g)
    down_slashed = slash(down_of_u, k - 2, g)

    r_lap = r_up = r_down = 0.0
    for z in samples:
        zc = as_complex(z)
        r_lap = max(r_lap, abs(laplacian_fd(slashed, k, zc, h) - lap_slashed(zc)))
        r_up = max(r_up, abs(maass_fd("up", slashed, k, zc, h) - up_slashed(zc)))
        r_down = max(r_down, abs(maass_fd("down", slashed, k, zc, h) - down_slashed(zc)))
    return r_lap, r_up, r_down
