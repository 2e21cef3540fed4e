"""Holomorphic q-expansions used as concrete test supply.

Provides the Dedekind eta product, the weight-12 discriminant cusp form and
the weight-4 Eisenstein series, all with exact integer coefficients computed
from their defining products/divisor sums.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "HolomorphicQExpansion",
    "eta_product",
    "discriminant_qexp",
    "eisenstein4_qexp",
]


@dataclass(frozen=True)
class HolomorphicQExpansion:
    """Left-finite Fourier expansion sum_{n >= n_min} a_n e^{2 pi i n z}."""

    coefficients: tuple[complex, ...]
    n_min: int = 0

    def __call__(self, z: complex) -> complex:
        q = cmath.exp(2j * cmath.pi * complex(z))
        # Horner from the top coefficient down
        acc = 0j
        for a in reversed(self.coefficients):
            acc = acc * q + a
        return acc * q ** self.n_min

    def __len__(self) -> int:
        return len(self.coefficients)


def eta_product(z: complex, terms: int = 200) -> complex:
    """Dedekind eta via e^{i pi z/12} prod (1 - q^n), truncated."""
    z = complex(z)
    q = cmath.exp(2j * cmath.pi * z)
    prod = 1 + 0j
    qn = 1 + 0j
    for _ in range(terms):
        qn *= q
        prod *= 1 - qn
    return cmath.exp(1j * cmath.pi * z / 12) * prod


@lru_cache(maxsize=None)
def discriminant_qexp(terms: int = 80) -> HolomorphicQExpansion:
    """The discriminant cusp form q prod (1-q^n)^24, exact integer coefficients."""
    # polynomial coefficients of prod_{n=1}^{terms} (1 - q^n)^24, truncated
    poly = [0] * (terms + 1)
    poly[0] = 1
    for n in range(1, terms + 1):
        # multiply by (1 - q^n)^24 using binomial coefficients
        binom = 1
        factor = [0] * (terms + 1)
        for j in range(0, terms // n + 1):
            if j > 24:
                break
            factor[j * n] = (-1) ** j * binom
            binom = binom * (24 - j) // (j + 1)
        new = [0] * (terms + 1)
        for i, pi_ in enumerate(poly):
            if pi_ == 0:
                continue
            for j in range(0, terms + 1 - i, n):
                f = factor[j]
                if f:
                    new[i + j] += pi_ * f
        poly = new
    coeffs = tuple(complex(c) for c in poly[: terms])
    return HolomorphicQExpansion(coefficients=coeffs, n_min=1)


def _sigma3(n: int) -> int:
    return sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def eisenstein4_qexp(terms: int = 80) -> HolomorphicQExpansion:
    """Weight-4 Eisenstein series 1 + 240 sum sigma_3(n) q^n."""
    coeffs = [complex(1)] + [complex(240 * _sigma3(n)) for n in range(1, terms)]
    return HolomorphicQExpansion(coefficients=tuple(coeffs), n_min=0)
