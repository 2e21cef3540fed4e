"""Generalized Maass wave forms as first-class evaluators.

Covers cusp expansions in the modified Whittaker basis, lifts of holomorphic
q-expansions, and truncated Eisenstein/Poincare series over bottom-row coset
representatives with certified tail bounds, plus the transformation-law and
growth verifiers.

Tail bounds combine three ingredients: the user-facing bound
|v(gamma)|^{-1} <= K mu(gamma)^alpha on the multiplier (alpha is heuristic,
see ``estimate_alpha``), mu(gamma) <= const (c^2+d^2) on bottom rows, and the
sharp pointwise constant c^2+d^2 <= C(z) |cz+d|^2, where C(z) is the larger
eigenvalue of the Gram form of (z, 1) divided by y^2.  On the standard
fundamental domain C(z) stays below 20/3.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .modgroup import (
    GroupElement,
    IDENTITY,
    NEG_IDENTITY,
    T,
    arg_principal,
    as_complex,
)
from .multiplier import MultiplierSystem, schreier_keys
from .operators import SmoothEvaluator
from .qexpansions import HolomorphicQExpansion
from .subgroup import CongruenceSubgroup, CuspData, coset_reps, cusps
from .whittaker import WhittakerParams, gamma_complex, inv_gamma_complex, normalized_M, normalized_W

__all__ = [
    "GeneralizedMaassForm",
    "FourierWhittakerExpansion",
    "SeriesSpec",
    "kappa_from_multiplier",
    "eval_expansion",
    "eval_expansion_detailed",
    "make_expansion_form",
    "lift_holomorphic",
    "eisenstein_truncated",
    "poincare_truncated",
    "series_tail_report",
    "verify_transformation",
    "verify_growth",
    "sharp_lattice_constant",
    "estimate_alpha",
    "bottom_rows",
    "complete_bottom_row",
]


@dataclass(frozen=True)
class GeneralizedMaassForm:
    """Evaluator with its group, weight, multiplier and spectral parameter.

    The eigenvalue is always derived as 1/4 - nu^2, never stored separately.
    """

    group: CongruenceSubgroup
    weight: complex
    multiplier: MultiplierSystem | None
    nu: complex
    evaluator: SmoothEvaluator
    provenance: str  # "expansion" | "lift" | "eisenstein" | "poincare"

    @property
    def eigenvalue(self) -> complex:
        return 0.25 - self.nu * self.nu

    def __call__(self, z) -> complex:
        return self.evaluator(z)


def kappa_from_multiplier(v: MultiplierSystem, cusp: CuspData) -> float:
    """The class in [0, 1) with v(stabilizer) = e^{2 pi i kappa}.

    Requires |v| = 1 at the stabilizer generator (weak parabolicity at the
    cusp), since otherwise no real kappa exists.
    """
    val = v.evaluate(cusp.stabilizer)
    if abs(abs(val) - 1.0) > 1e-9:
        raise ValueError(
            f"multiplier is not weakly parabolic at cusp {cusp.q}: |v| = {abs(val)}"
        )
    kappa = (cmath.phase(val) / (2 * math.pi)) % 1.0
    if kappa >= 1.0:
        kappa -= 1.0
    if abs(cmath.exp(2j * math.pi * kappa) - val) > 1e-12:
        raise ArithmeticError("kappa reconstruction failed")
    return kappa


def _is_integer(x: float, tol: float = 1e-9) -> bool:
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class FourierWhittakerExpansion:
    """Cusp expansion data: decaying (A) and growing (B) coefficients plus zero mode.

    All frequencies are congruent to kappa mod 1 and nonzero; growing-mode
    support obeys 2 pi |n| / width < growth_bound; the zero mode is only
    allowed when kappa is an integer.
    """

    cusp: CuspData
    kappa: float
    nu: complex
    weight: complex
    a_coeffs: Mapping[float, complex] = field(default_factory=dict)
    b_coeffs: Mapping[float, complex] = field(default_factory=dict)
    c_plus: complex = 0.0
    c_minus: complex = 0.0
    growth_bound: float = math.inf

    def __post_init__(self):
        if not 0.0 <= self.kappa < 1.0:
            raise ValueError("kappa must lie in [0, 1)")
        width = self.cusp.width
        for tag, coeffs in (("A", self.a_coeffs), ("B", self.b_coeffs)):
            for n in coeffs:
                if n == 0:
                    raise ValueError(f"{tag} frequencies must be nonzero")
                if not _is_integer(n - self.kappa):
                    raise ValueError(
                        f"{tag} frequency {n} is not congruent to kappa={self.kappa} mod 1"
                    )
        for n in self.b_coeffs:
            if not 2 * math.pi * abs(n) / width < self.growth_bound:
                raise ValueError(
                    f"growing coefficient at frequency {n} violates the support bound "
                    f"2 pi |n| / width < {self.growth_bound}"
                )
        if not _is_integer(self.kappa) and (self.c_plus != 0 or self.c_minus != 0):
            raise ValueError("zero mode must vanish when kappa is not an integer")


def _w_tail_crude(index: complex, t: float) -> float:
    """Crude magnitude bound for the decaying profile at large argument."""
    return 3.0 * math.exp(-0.5 * t) * t ** max(index.real, 0.0)


def eval_expansion_detailed(
    e: FourierWhittakerExpansion, z, n_trunc: int, y_min: float = 0.3
) -> tuple[complex, float]:
    """Truncated expansion value plus an error budget.

    The budget adds the Whittaker evaluation errors of retained terms and a
    decay bound for every dropped decaying term.
    """
    zc = as_complex(z)
    x, y = zc.real, zc.imag
    if y < y_min:
        raise ValueError(f"evaluation point must satisfy Im z >= {y_min}")
    width = e.cusp.width
    total = 0j
    err = 0.0
    for n, coeff in sorted(e.a_coeffs.items()):
        t = 4 * math.pi * abs(n) * y / width
        if abs(n) > n_trunc:
            err += abs(coeff) * abs(n) ** -0.5 * _w_tail_crude((1 if n > 0 else -1) * e.weight / 2, t)
            continue
        r = normalized_W(WhittakerParams((1 if n > 0 else -1) * e.weight / 2, e.nu), t)
        phase = cmath.exp(2j * math.pi * n * x / width)
        total += coeff * abs(n) ** -0.5 * r.value * phase
        err += abs(coeff) * abs(n) ** -0.5 * r.abs_error_estimate
    for n, coeff in sorted(e.b_coeffs.items()):
        if abs(n) > n_trunc:
            raise ValueError("growing-mode terms cannot be truncated away safely")
        t = 4 * math.pi * abs(n) * y / width
        r = normalized_M(WhittakerParams((1 if n > 0 else -1) * e.weight / 2, e.nu), t)
        phase = cmath.exp(2j * math.pi * n * x / width)
        total += coeff * abs(n) ** -0.5 * r.value * phase
        err += abs(coeff) * abs(n) ** -0.5 * r.abs_error_estimate
    if e.c_plus != 0:
        total += e.c_plus * cmath.exp((0.5 + e.nu) * math.log(y))
    if e.c_minus != 0:
        total += e.c_minus * cmath.exp((0.5 - e.nu) * math.log(y))
    return total, err


def eval_expansion(e: FourierWhittakerExpansion, z, n_trunc: int, y_min: float = 0.3) -> complex:
    """Truncated sum of the cusp expansion at z, frequencies up to n_trunc."""
    return eval_expansion_detailed(e, z, n_trunc, y_min)[0]


def make_expansion_form(
    group: CongruenceSubgroup,
    v: MultiplierSystem | None,
    e: FourierWhittakerExpansion,
    n_trunc: int | None = None,
) -> GeneralizedMaassForm:
    """Wrap an expansion as a form evaluated in the cusp coordinate."""
    if n_trunc is None:
        freqs = [abs(n) for n in (*e.a_coeffs, *e.b_coeffs)] or [1.0]
        n_trunc = int(math.ceil(max(freqs)))

    def fn(z: complex) -> complex:
        return eval_expansion(e, z, n_trunc)

    return GeneralizedMaassForm(
        group=group,
        weight=e.weight,
        multiplier=v,
        nu=e.nu,
        evaluator=SmoothEvaluator(fn=fn, weight=e.weight, nu=e.nu),
        provenance="expansion",
    )


def lift_holomorphic(
    f: HolomorphicQExpansion | Callable[[complex], complex],
    k: complex,
    v: MultiplierSystem,
) -> GeneralizedMaassForm:
    """Multiply a holomorphic weight-k form by Im(z)^{k/2}.

    The result is annihilated by the lowering operator and is an
    eigenfunction with eigenvalue (k/2)(1 - k/2); the spectral parameter is
    taken as nu = (k - 1)/2, one of the two roots.
    """
    k = complex(k)

    def fn(z: complex) -> complex:
        return cmath.exp(0.5 * k * math.log(z.imag)) * f(z)

    return GeneralizedMaassForm(
        group=v.group,
        weight=k,
        multiplier=v,
        nu=(k - 1) / 2,
        evaluator=SmoothEvaluator(fn=fn, weight=k, nu=(k - 1) / 2),
        provenance="lift",
    )


def sharp_lattice_constant(z) -> float:
    """Sharp C(z) with c^2 + d^2 <= C(z) |cz + d|^2 for all real (c, d).

    This is the larger eigenvalue of the Gram form of (z, 1) divided by y^2;
    it stays below 20/3 on the standard fundamental domain.
    """
    zc = as_complex(z)
    x, y = zc.real, zc.imag
    tr = x * x + y * y + 1.0
    disc = math.sqrt(max(tr * tr - 4.0 * y * y, 0.0))
    lam_max = 0.5 * (tr + disc)
    return lam_max / (y * y)


def estimate_alpha(v: MultiplierSystem) -> float:
    """Heuristic growth exponent with |v(gamma)|^{+-1} <= K mu(gamma)^alpha.

    Samples the coset representatives and Schreier generators, takes the
    largest log |v| / log mu, and doubles it as a safety margin.  Returns 0
    for multipliers that look unitary on the sample.
    """
    table = v.table
    worst = 0.0
    seen = set()
    for g in (*table.reps, *table.schreier.values()):
        if g.entries() in seen or not v.group.contains(g):
            continue
        seen.add(g.entries())
        mu = g.a ** 2 + g.b ** 2 + g.c ** 2 + g.d ** 2
        if mu < 3:
            continue
        val = abs(v.evaluate(g))
        if val <= 0:
            continue
        worst = max(worst, abs(math.log(val)) / math.log(mu))
    return 2.0 * worst


@dataclass
class SeriesSpec:
    """Parameters of a truncated Eisenstein/Poincare sum.

    ``seed`` selects the function averaged over the cosets of the stabilizer
    of infinity: "power" (Im z)^{1/2+nu} at weight 0, "lifted-holomorphic"
    Im(z)^{k/2} h(z) with a bounded holomorphic h, or "mtilde-term" a single
    growing Whittaker term of frequency n.  ``radius`` cuts off bottom rows
    by c^2 + d^2 <= radius^2.  ``alpha`` and ``k_const`` parametrize the
    multiplier growth bound used for the tail.
    """

    seed: str
    multiplier: MultiplierSystem
    radius: float
    nu: complex | None = None
    weight: complex = 0.0
    alpha: float = 0.0
    k_const: float = 1.0
    h: Callable[[complex], complex] | None = None
    h_sup: float = 1.0
    n: float | None = None

    def __post_init__(self):
        self.weight = complex(self.weight)
        if self.seed == "power":
            if self.nu is None:
                raise ValueError("power seed needs nu")
            self.nu = complex(self.nu)
            self.weight = 0j
            if not self.nu.real > max(self.alpha, 0.0):
                raise ValueError("Eisenstein convergence requires Re nu > max(alpha, 0)")
        elif self.seed == "lifted-holomorphic":
            if not self.weight.real > 2 * self.alpha + 1:
                raise ValueError("Poincare convergence requires Re k > 2 alpha + 1")
            if self.h is None:
                self.h = lambda z: 1.0 + 0j
        elif self.seed == "mtilde-term":
            if self.nu is None or self.n in (None, 0):
                raise ValueError("mtilde seed needs nu and a nonzero frequency n")
            self.nu = complex(self.nu)
            if not self.nu.real > max(self.alpha, 0.0):
                raise ValueError("convergence requires Re nu > max(alpha, 0)")
        else:
            raise ValueError(f"unknown seed {self.seed!r}")
        if self.multiplier.group.kind != "gamma0":
            raise NotImplementedError("series sums are implemented for gamma0 levels")
        if abs(self.weight.imag) > 1e-12:
            raise NotImplementedError("series tail bounds assume real weight")

    def seed_fn(self) -> Callable[[complex], complex]:
        if self.seed == "power":
            nu = self.nu

            def power(z: complex) -> complex:
                return cmath.exp((0.5 + nu) * math.log(z.imag))

            return power
        if self.seed == "lifted-holomorphic":
            k, h = self.weight, self.h

            def lifted(z: complex) -> complex:
                return cmath.exp(0.5 * k * math.log(z.imag)) * h(z)

            return lifted
        k2 = self.weight / 2
        nu, n = self.nu, self.n
        scale = 4 * math.pi * abs(n)

        def mtilde(z: complex) -> complex:
            return normalized_M(WhittakerParams(k2, nu), scale * z.imag).value * cmath.exp(
                2j * math.pi * n * z.real
            )

        return mtilde

    def decay_exponent(self) -> float:
        """Exponent w with |seed(gamma z)| = O(Im(gamma z)^w) into the cusp."""
        if self.seed == "power":
            return 0.5 + self.nu.real
        if self.seed == "lifted-holomorphic":
            return self.weight.real / 2
        return 0.5 + self.nu.real


def bottom_rows(group: CongruenceSubgroup, radius: float) -> Iterable[tuple[int, int]]:
    """One bottom row per coset of the stabilizer of infinity, c^2+d^2 <= R^2.

    Rows are (0, 1) and all (c, d) with c > 0 admissible for the group and
    gcd(c, d) = 1; every integer d appears, matching the classical
    parametrization of the sum.
    """
    yield (0, 1)
    step = group.level if group.kind == "gamma0" else 1
    if group.kind != "gamma0":
        raise NotImplementedError("bottom-row enumeration is implemented for gamma0 levels")
    r2 = radius * radius
    c = step
    while c * c <= r2:
        dmax = int(math.isqrt(int(r2 - c * c)))
        for d in range(-dmax, dmax + 1):
            if math.gcd(c, d) == 1:
                yield (c, d)
        c += step


def complete_bottom_row(c: int, d: int) -> GroupElement:
    """Some integer matrix of determinant one with the given bottom row."""
    if math.gcd(c, d) != 1:
        raise ValueError("bottom row must be coprime")
    # a*d - b*c = 1 via extended gcd
    old_r, r = d, c
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r == -1:
        old_x, old_y = -old_x, -old_y
    return GroupElement(old_x, -old_y, c, d)


def _check_seed_compatibility(spec: SeriesSpec):
    """The seed must transform under the stabilizer of infinity like the multiplier."""
    group = spec.multiplier.group
    width = next(c.width for c in cusps(group) if c.q.is_infinity)
    f = spec.seed_fn()
    k = spec.weight
    gens = [T ** width]
    if group.contains(NEG_IDENTITY):
        gens.append(NEG_IDENTITY)
    for delta in gens:
        expected = spec.multiplier.evaluate(delta)
        for z0 in (0.31 + 1.07j, -0.17 + 0.83j):
            w = delta.c * z0 + delta.d
            lhs = cmath.exp(-1j * k * arg_principal(w)) * f(delta.moebius(z0))
            if abs(lhs - expected * f(z0)) > 1e-8 * (1 + abs(f(z0))):
                raise ValueError(
                    "seed is incompatible with the multiplier at the infinite cusp"
                )


def _mtilde_prefactor_bound(spec: SeriesSpec, t_max: float) -> float:
    """sup over t <= t_max of |growing profile(t)| / t^{Re nu + 1/2}."""
    k2 = spec.weight / 2
    nu = spec.nu
    a = nu - k2 + 0.5
    b = 1 + 2 * nu
    head = abs(gamma_complex(0.5 + nu - k2))
    total = abs(inv_gamma_complex(b))
    p = 1 + 0j
    for n_i in range(40):
        p *= (a + n_i) * t_max / (n_i + 1)
        total += abs(p * inv_gamma_complex(b + n_i + 1))
    return head * total * math.exp(0.5 * t_max)


def _tail_components(spec: SeriesSpec, z: complex) -> dict:
    w = spec.decay_exponent()
    beta = w - spec.alpha
    y = z.imag
    c_sharp = sharp_lattice_constant(z)
    if spec.seed == "power":
        sup_f = 1.0
    elif spec.seed == "lifted-holomorphic":
        sup_f = spec.h_sup
    else:
        t_max = 4 * math.pi * abs(spec.n) * y * c_sharp / max(spec.radius ** 2, 1.0)
        sup_f = _mtilde_prefactor_bound(spec, t_max)
    pref = spec.k_const * sup_f * (y * c_sharp) ** w
    term_bound = pref * spec.radius ** (-2 * beta)
    if beta <= 1.0:
        bound = math.inf
    else:
        r_eff = max(spec.radius - 2.0, 1.0)
        bound = pref * math.pi * r_eff ** (2 - 2 * beta) / (beta - 1.0)
    return {
        "tail_bound": bound,
        "leading_term_bound": term_bound,
        "term_decay_exponent": 2 * beta,
        "sharp_constant": c_sharp,
    }


def series_tail_report(spec: SeriesSpec, z) -> dict:
    """Tail-bound components at z: integral bound, leading omitted term, exponent."""
    return _tail_components(spec, as_complex(z))


def _series_sum(spec: SeriesSpec, z: complex) -> complex:
    group = spec.multiplier.group
    v = spec.multiplier
    f = spec.seed_fn()
    k = spec.weight
    total = 0j
    trivial = v.is_trivial
    for c, d in bottom_rows(group, spec.radius):
        gamma = complete_bottom_row(c, d)
        w = c * z + d
        phase = cmath.exp(-1j * k * arg_principal(w)) if k != 0 else 1.0
        vfac = 1.0 if trivial else 1.0 / v.evaluate(gamma)
        total += vfac * phase * f(gamma.moebius(z))
    return total


def eisenstein_truncated(spec: SeriesSpec, z) -> tuple[complex, float]:
    """Partial Eisenstein sum over bottom rows within the radius, plus tail bound."""
    if spec.seed != "power":
        raise ValueError("Eisenstein sums use the power seed")
    zc = as_complex(z)
    _check_seed_compatibility(spec)
    return _series_sum(spec, zc), _tail_components(spec, zc)["tail_bound"]


def poincare_truncated(spec: SeriesSpec, z) -> tuple[complex, float]:
    """Partial Poincare sum (lifted holomorphic or growing-term seed), plus tail bound."""
    if spec.seed not in ("lifted-holomorphic", "mtilde-term"):
        raise ValueError("Poincare sums use the lifted-holomorphic or mtilde-term seed")
    zc = as_complex(z)
    _check_seed_compatibility(spec)
    return _series_sum(spec, zc), _tail_components(spec, zc)["tail_bound"]


def verify_transformation(
    u: GeneralizedMaassForm, samples: Iterable[tuple[GroupElement, complex]]
) -> float:
    """max over samples of |e^{-ik arg(cz+d)} u(gz) - v(g) u(z)| / (1 + |u(z)|)."""
    worst = 0.0
    k = complex(u.weight)
    for g, z in samples:
        zc = as_complex(z)
        w = g.c * zc + g.d
        lhs = cmath.exp(-1j * k * arg_principal(w)) * u(g.moebius(zc))
        vg = u.multiplier.evaluate(g) if u.multiplier is not None else 1.0
        rhs = vg * u(zc)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(u(zc))))
    return worst


def verify_growth(
    u: GeneralizedMaassForm,
    cusp: CuspData,
    c: float,
    y_grid: list[float],
    x0: float = 0.0,
) -> bool:
    """Sampled evidence that u(scaling z) = O(e^{c y}) along the grid.

    Computes |u(g_q (x0 + iy))| e^{-c y} on the increasing grid and accepts
    iff the sequence is non-increasing from the first point where it starts
    decreasing.
    """
    if list(y_grid) != sorted(y_grid) or y_grid[-1] < 20:
        raise ValueError("y grid must be increasing with maximum at least 20")
    vals = []
    g = cusp.scaling
    for y in y_grid:
        z = complex(x0, y)
        vals.append(abs(u(g.moebius(z))) * math.exp(-c * y))
    start = None
    for i in range(len(vals) - 1):
        if vals[i + 1] <= vals[i] * (1 + 1e-8):
            start = i
            break
    if start is None:
        return False
    return all(
        vals[i + 1] <= vals[i] * (1 + 1e-6) for i in range(start, len(vals) - 1)
    )
