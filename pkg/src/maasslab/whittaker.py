"""Whittaker functions of complex parameters on the positive half-line.

Evaluation strategy for the decaying solution W:

  * large argument: the divergent-asymptotic series, truncated at its
    smallest term, accepted only when that term is negligible;
  * Re(nu - k + 1/2) bounded away from zero: the Laplace integral of the
    Tricomi function via adaptive quadrature;
  * otherwise a short series fallback at small argument, or the first-index
    recurrence seeded from quadrature values (stable in the direction used,
    since W dominates there).

The growing solution M comes from the confluent hypergeometric power series.
Every evaluation returns an explicit absolute error estimate so downstream
expansion sums can budget truncation error.

The modified pair keeps W unchanged and rescales M by
Gamma(1/2 + nu - k)/Gamma(1 + 2 nu); the rescaled M is computed through the
entire regularized series, so second indices at the negative half-integers
(where Gamma(1 + 2 nu) blows up) are handled without special casing.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from scipy.integrate import IntegrationWarning, quad

__all__ = [
    "WhittakerParams",
    "EvalResult",
    "WhittakerDomainError",
    "gamma_complex",
    "inv_gamma_complex",
    "kummer_M",
    "whittaker_M",
    "whittaker_W",
    "normalized_M",
    "normalized_W",
    "whittaker_ode_residual",
]


class WhittakerDomainError(ValueError):
    """Raised at parameter poles or when no evaluation route converges."""


@dataclass(frozen=True)
class WhittakerParams:
    """First and second index of the Whittaker differential equation."""

    k: complex
    nu: complex

    def __post_init__(self):
        object.__setattr__(self, "k", complex(self.k))
        object.__setattr__(self, "nu", complex(self.nu))


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_error_estimate: float
    method: str


def _near_nonpositive_integer(z: complex, tol: float = 1e-10) -> bool:
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol


# Lanczos rational approximation, g = 607/128 with 15 coefficients.  The set
# is accurate to roughly 1e-13 relative over the right half-plane; the left
# half-plane goes through the reflection formula.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


def gamma_complex(z: complex) -> complex:
    """Gamma function for complex argument; raises at the poles."""
    z = complex(z)
    if _near_nonpositive_integer(z):
        raise WhittakerDomainError(f"gamma pole at {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma_complex(1.0 - z))
    zz = z - 1.0
    acc = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        acc += c / (zz + i)
    t = zz + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * cmath.exp((zz + 0.5) * cmath.log(t) - t) * acc


def inv_gamma_complex(z: complex) -> complex:
    """Entire reciprocal 1/Gamma; returns 0 at the poles of Gamma."""
    z = complex(z)
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * gamma_complex(1.0 - z) / math.pi
    return 1.0 / gamma_complex(z)


_MAX_TERMS = 20000


def kummer_M(a: complex, b: complex, y: float) -> EvalResult:
    """Confluent hypergeometric 1F1(a; b; y) by power series, with error estimate."""
    a, b = complex(a), complex(b)
    if _near_nonpositive_integer(b, tol=1e-12):
        raise WhittakerDomainError(f"parameter pole: second parameter {b} is a non-positive integer")
    if y == 0:
        return EvalResult(1.0 + 0j, 0.0, "series")
    term = 1 + 0j
    total = 1 + 0j
    max_abs = 1.0
    n = 0
    while True:
        term *= (a + n) * y / ((b + n) * (n + 1))
        total += term
        n += 1
        t = abs(term)
        if t > max_abs:
            max_abs = t
        if t <= 1e-17 * abs(total) and n > y + 8:
            break
        if n > _MAX_TERMS:
            raise WhittakerDomainError("hypergeometric series did not converge")
    err = 2.0 * abs(term) + 5e-16 * max_abs * math.sqrt(n)
    return EvalResult(total, err, "series")


def _kummer_M_regularized(a: complex, b: complex, y: float) -> EvalResult:
    """1F1(a; b; y)/Gamma(b), entire in b (Buchholz continuation path)."""
    a, b = complex(a), complex(b)
    # p_n = (a)_n y^n / n!, term_n = p_n / Gamma(b + n)
    p = 1 + 0j
    total = inv_gamma_complex(b)
    max_abs = abs(total)
    n = 0
    while True:
        p *= (a + n) * y / (n + 1)
        n += 1
        term = p * inv_gamma_complex(b + n)
        total += term
        t = abs(term)
        if t > max_abs:
            max_abs = t
        if t <= 1e-17 * max(abs(total), 1e-300) and n > y + 8 and n > abs(b) + 2:
            break
        if n > _MAX_TERMS:
            raise WhittakerDomainError("regularized series did not converge")
    err = 2.0 * abs(term) + 5e-16 * max_abs * math.sqrt(n)
    return EvalResult(total, err, "series")


def _power(y: float, e: complex) -> complex:
    return cmath.exp(e * math.log(y))


def whittaker_M(p: WhittakerParams, y: float) -> EvalResult:
    """The solution growing like e^{y/2} y^{-k} at infinity."""
    if not y > 0:
        raise WhittakerDomainError("argument must be positive")
    k, nu = p.k, p.nu
    a = nu - k + 0.5
    b = 1.0 + 2.0 * nu
    pref = cmath.exp(-0.5 * y) * _power(y, nu + 0.5)
    if abs(b.imag) < 1e-6 and round(b.real) <= 0 and abs(b.real - round(b.real)) < 1e-6:
        if _near_nonpositive_integer(b, tol=1e-12):
            raise WhittakerDomainError(f"second index pole: 1 + 2 nu = {b}")
        # near-pole: go through the entire regularized series and scale back
        reg = _kummer_M_regularized(a, b, y)
        gb = gamma_complex(b)
        return EvalResult(pref * gb * reg.value, abs(pref * gb) * reg.abs_error_estimate, "series")
    f = kummer_M(a, b, y)
    return EvalResult(pref * f.value, abs(pref) * f.abs_error_estimate, "series")


def _w_asymptotic(k: complex, nu: complex, y: float) -> EvalResult:
    """Divergent expansion e^{-y/2} y^k sum_s c_s / y^s truncated at the least term."""
    term = 1 + 0j
    total = 1 + 0j
    smallest = 1.0
    s = 0
    while True:
        s += 1
        num = nu * nu - (k - s + 0.5) ** 2
        term *= num / (s * y)
        t = abs(term)
        if t >= smallest and s > 2:
            # smallest term reached; stop without adding the growing tail
            break
        total += term
        smallest = t
        if t <= 1e-18 * abs(total) or s > 400:
            break
    pref = cmath.exp(-0.5 * y) * _power(y, k)
    err = abs(pref) * (smallest + 1e-16 * abs(total))
    return EvalResult(pref * total, err, "asymptotic")


def _quad_complex(f, lo, hi, **kw) -> tuple[complex, float]:
    # roundoff chatter from QUADPACK is expected near the flattened endpoint
    # singularity; accuracy is accounted for through the returned estimates
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        re, re_err = quad(lambda t: f(t).real, lo, hi, **kw)
        im, im_err = quad(lambda t: f(t).imag, lo, hi, **kw)
    return complex(re, im), re_err + im_err


def _w_integral(k: complex, nu: complex, y: float) -> EvalResult:
    """Laplace integral of the Tricomi function; requires Re(nu - k + 1/2) > 0."""
    a = nu - k + 0.5
    b = 1.0 + 2.0 * nu
    if a.real <= 0:
        raise WhittakerDomainError("integral representation needs Re(nu - k + 1/2) > 0")
    c = b - a - 1.0
    # substitution t = u^p on [0, 1] flattens the endpoint singularity t^(a-1)
    psub = max(1, math.ceil(2.2 / a.real))

    def piece_near(u: float) -> complex:
        if u == 0.0:
            return 0j
        lu = math.log(u)
        t = u ** psub
        return psub * cmath.exp(-y * t + (psub * a - 1.0) * lu + c * cmath.log(1.0 + t))

    def piece_far(t: float) -> complex:
        return cmath.exp(-y * t + (a - 1.0) * cmath.log(t) + c * cmath.log(1.0 + t))

    v1, e1 = _quad_complex(piece_near, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=300)
    v2, e2 = _quad_complex(piece_far, 1.0, math.inf, epsabs=1e-15, epsrel=1e-13, limit=300)
    integral = v1 + v2
    ga = gamma_complex(a)
    u_val = integral / ga
    pref = cmath.exp(-0.5 * y) * _power(y, nu + 0.5)
    err = abs(pref) * ((e1 + e2) / abs(ga) + 1e-15 * abs(u_val))
    return EvalResult(pref * u_val, err, "integral")


def _w_connection(k: complex, nu: complex, y: float) -> EvalResult:
    """W from the two M solutions; loses about e^y of relative precision."""
    if abs(2 * nu.real - round(2 * nu.real)) < 1e-6 and abs(nu.imag) < 1e-6:
        # degenerate connection coefficients: average two nudged evaluations
        delta = 1e-5
        r1 = _w_connection(k, nu + delta, y)
        r2 = _w_connection(k, nu - delta, y)
        val = 0.5 * (r1.value + r2.value)
        err = 0.5 * (r1.abs_error_estimate + r2.abs_error_estimate)
        err += 0.5 * abs(r1.value - r2.value) + 1e-10 * abs(val)
        return EvalResult(val, err, "series")
    m_plus = whittaker_M(WhittakerParams(k, nu), y)
    m_minus = whittaker_M(WhittakerParams(k, -nu), y)
    c_plus = gamma_complex(-2 * nu) * inv_gamma_complex(0.5 - nu - k)
    c_minus = gamma_complex(2 * nu) * inv_gamma_complex(0.5 + nu - k)
    t1 = c_plus * m_plus.value
    t2 = c_minus * m_minus.value
    val = t1 + t2
    cancel = abs(t1) + abs(t2)
    err = (
        abs(c_plus) * m_plus.abs_error_estimate
        + abs(c_minus) * m_minus.abs_error_estimate
        + 4e-16 * cancel
    )
    return EvalResult(val, err, "series")


def whittaker_W(p: WhittakerParams, y: float) -> EvalResult:
    """The solution decaying like e^{-y/2} y^k at infinity."""
    if not y > 0:
        raise WhittakerDomainError("argument must be positive")
    k = p.k
    nu = p.nu if p.nu.real >= 0 else -p.nu  # W is symmetric in the second index
    a = nu - k + 0.5

    if y >= 30.0:
        r = _w_asymptotic(k, nu, y)
        if r.abs_error_estimate <= 1e-11 * max(abs(r.value), 1e-300):
            return r
    if a.real > 0.25:
        return _w_integral(k, nu, y)
    if y <= 8.0:
        return _w_connection(k, nu, y)

    # raise the first index by integer steps from a region where the integral
    # works; W dominates in the increasing-index direction, so the forward
    # recurrence W_{K+1} = (y - 2K) W_K - ((K - 1/2)^2 - nu^2) W_{K-1} is stable
    m = math.ceil(0.75 - a.real)
    k0 = k - m
    w_prev = _w_integral(k0 - 1, nu, y)
    w_cur = _w_integral(k0, nu, y)
    val_prev, err_prev = w_prev.value, w_prev.abs_error_estimate
    val_cur, err_cur = w_cur.value, w_cur.abs_error_estimate
    kk = k0
    for _ in range(m):
        coef1 = y - 2 * kk
        coef2 = (kk - 0.5) ** 2 - nu * nu
        val_next = coef1 * val_cur - coef2 * val_prev
        err_next = (
            abs(coef1) * err_cur
            + abs(coef2) * err_prev
            + 2e-16 * (abs(coef1 * val_cur) + abs(coef2 * val_prev))
        )
        val_prev, err_prev = val_cur, err_cur
        val_cur, err_cur = val_next, err_next
        kk = kk + 1
    return EvalResult(val_cur, err_cur, "integral")


def normalized_W(p: WhittakerParams, y: float) -> EvalResult:
    """The modified decaying solution; identical to W by definition."""
    return whittaker_W(p, y)


def normalized_M(p: WhittakerParams, y: float) -> EvalResult:
    """The modified growing solution Gamma(1/2 + nu - k)/Gamma(1 + 2 nu) * M.

    Computed through the entire regularized series, so it stays well defined
    when the second index sits at a negative half-integer.  The Gamma
    prefactor pole (first index minus second index in {1/2, 3/2, ...}) is a
    genuine domain error and is reported as such.
    """
    if not y > 0:
        raise WhittakerDomainError("argument must be positive")
    k, nu = p.k, p.nu
    head = 0.5 + nu - k
    if _near_nonpositive_integer(head, tol=1e-8):
        raise WhittakerDomainError(
            f"normalization undefined: k - nu = {k - nu} lies in {{1/2, 3/2, ...}}"
        )
    a = nu - k + 0.5
    b = 1.0 + 2.0 * nu
    reg = _kummer_M_regularized(a, b, y)
    pref = gamma_complex(head) * cmath.exp(-0.5 * y) * _power(y, nu + 0.5)
    return EvalResult(pref * reg.value, abs(pref) * reg.abs_error_estimate, "series")


def whittaker_ode_residual(G, k: complex, nu: complex, y: float, h: float | None = None) -> float:
    """Relative residual of G'' + (-1/4 + k/y + (1/4 - nu^2)/y^2) G at y.

    Uses a fourth-order central stencil for the second derivative; the step
    is scaled with sqrt(y) and clamped so the stencil stays positive.
    """
    if h is None:
        h = min(0.005 * max(1.0, math.sqrt(y)), y / 8.0)
    g_m2 = G(y - 2 * h)
    g_m1 = G(y - h)
    g_0 = G(y)
    g_p1 = G(y + h)
    g_p2 = G(y + 2 * h)
    second = (-g_p2 + 16 * g_p1 - 30 * g_0 + 16 * g_m1 - g_m2) / (12 * h * h)
    coef = -0.25 + k / y + (0.25 - nu * nu) / (y * y)
    residual = second + coef * g_0
    scale = abs(second) + abs(coef * g_0) + 1e-300
    return abs(residual) / scale
