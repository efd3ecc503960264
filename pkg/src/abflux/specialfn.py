"""
Real-order Gamma and Bessel kernels.

Orders are restricted to (-1, 2) and arguments to x > 0. That covers every order
the flux problem needs: 1-alpha, alpha, their negatives and one recurrence step.

Regimes for J_nu and K_nu:

- x <= 2: ascending series in double precision (J only).
- 2 < x < max(17, 2 nu^2): ascending series accumulated with mpmath at 40 digits.
  In double precision the terms grow to about I_nu(x) before cancelling down to
  the result, which costs up to eleven digits at the crossover.
- x >= max(17, 2 nu^2): Hankel asymptotic expansion truncated at its smallest
  term. The truncation error is of order exp(-2x), below 1e-14 from x = 17 on.

K_nu uses K_nu = pi (I_{-nu} - I_nu) / (2 sin(pi nu)) below the crossover. Near
integer orders the working precision is raised by the number of digits lost in
sin(pi nu). Exact integers are nudged off the removable point by far less than
double precision can resolve.
"""

import cmath
import math
import threading
from typing import Any

from mpmath import MPContext

from abflux.errors import DomainError

ORDER_MIN = -1.0
ORDER_MAX = 2.0

SERIES_DOUBLE_LIMIT = 2.0
ASYMPTOTIC_FROM = 17.0
EXTENDED_DPS = 40
NEAR_INTEGER = 1e-6

_MAX_TERMS = 400

_local = threading.local()

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _lanczos(x: float) -> float:
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (x + 0.5) * math.exp(-t) * acc


def gamma_real(x: float) -> float:
    """Gamma function on the open interval (0, 3).

    Uses the reflection formula below 1/2 and the Lanczos sum above.

    Raises:
        DomainError: if x is outside (0, 3)
    """
    if not (0.0 < x < 3.0):
        raise DomainError(f"gamma_real is defined on (0, 3), got {x!r}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    return _lanczos(x)


def _check_order(nu: float) -> None:
    if not (ORDER_MIN < nu < ORDER_MAX):
        raise DomainError(f"Bessel order must lie in (-1, 2), got {nu!r}")


def _check_argument(x: float) -> None:
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"Bessel argument must be positive and finite, got {x!r}")


def crossover(nu: float) -> float:
    """Argument above which the Hankel asymptotic expansion is used."""
    return max(ASYMPTOTIC_FROM, 2.0 * nu * nu)


def _hankel_terms(nu: float, x: float) -> list[float]:
    """Terms a_k(nu) / x^k of the Hankel expansion, up to the smallest one."""
    mu = 4.0 * nu * nu
    terms = [1.0]
    term = 1.0
    for k in range(1, _MAX_TERMS):
        nxt = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if nxt == 0.0 or abs(nxt) >= abs(term):
            break
        terms.append(nxt)
        term = nxt
        if abs(term) < 1e-17:
            break
    return terms


def _j_asymptotic(nu: float, x: float) -> float:
    terms = _hankel_terms(nu, x)
    p = math.fsum(t * (-1) ** (k // 2) for k, t in enumerate(terms) if k % 2 == 0)
    q = math.fsum(t * (-1) ** (k // 2) for k, t in enumerate(terms) if k % 2 == 1)
    chi = x - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def _k_asymptotic(nu: float, x: float) -> float:
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * math.fsum(_hankel_terms(nu, x))


def _j_series_double(nu: float, x: float) -> float:
    half = 0.5 * x
    y = -half * half
    term = half**nu / gamma_real(nu + 1.0)
    total = term
    for k in range(1, _MAX_TERMS):
        term *= y / (k * (nu + k))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def _context(dps: int) -> MPContext:
    """Per-thread mpmath context; the shared ``mp`` precision is process-global."""
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = MPContext()
    ctx.dps = dps
    return ctx


def _ascending_series(ctx: MPContext, order: Any, half: Any, sign: int) -> Any:
    """sum_k sign^k (x/2)^(2k+order) / (k! Gamma(k+order+1)) at the precision of ctx."""
    y = sign * half * half
    term = half**order * ctx.rgamma(order + 1)
    total = term
    eps = ctx.mpf(10) ** (-ctx.dps)
    for k in range(1, _MAX_TERMS):
        term = term * y / (k * (order + k))
        total += term
        if k > 2 and abs(term) <= eps * abs(total):
            break
    return total


def _j_series_extended(nu: float, x: float) -> float:
    ctx = _context(EXTENDED_DPS)
    return float(_ascending_series(ctx, ctx.mpf(nu), ctx.mpf(x) / 2, -1))


def _k_series(nu: float, x: float) -> float:
    order = abs(nu)
    gap = abs(order - round(order))
    extra = 0 if gap >= NEAR_INTEGER else int(-math.log10(max(gap, 1e-30))) + 4
    ctx = _context(EXTENDED_DPS + extra)
    mu = ctx.mpf(order)
    if gap == 0.0:
        mu += ctx.mpf(10) ** (-(EXTENDED_DPS // 2 + extra))
    half = ctx.mpf(x) / 2
    diff = _ascending_series(ctx, -mu, half, 1) - _ascending_series(ctx, mu, half, 1)
    return float(ctx.pi * diff / (2 * ctx.sin(ctx.pi * mu)))


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind J_nu(x) for nu in (-1, 2), x > 0."""
    _check_order(nu)
    _check_argument(x)
    if x >= crossover(nu):
        return _j_asymptotic(nu, x)
    if x <= SERIES_DOUBLE_LIMIT:
        return _j_series_double(nu, x)
    return _j_series_extended(nu, x)


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind K_nu(x) for nu in (-1, 2), x > 0."""
    _check_order(nu)
    _check_argument(x)
    if x >= crossover(nu):
        return _k_asymptotic(nu, x)
    return _k_series(nu, x)


def branch_power(z: complex, nu: float) -> complex:
    """Complex power z^nu with the phase of z taken in [0, 2 pi).

    This is not the principal branch: in the lower half plane the phase lies in
    (pi, 2 pi). In particular branch_power(1j, a) equals e^{i pi a / 2}.
    """
    if z == 0:
        if nu > 0:
            return 0j
        raise DomainError("branch_power(0, nu) needs nu > 0")
    phi = cmath.phase(z)
    if phi < 0.0:
        phi += 2.0 * math.pi
    return abs(z) ** nu * cmath.exp(1j * phi * nu)


def hankel1_imaginary(nu: float, x: float) -> complex:
    """H^(1)_nu(i x) for x > 0, as (2 / (pi i)) e^{-i pi nu / 2} K_nu(x)."""
    return (2.0 / (math.pi * 1j)) * cmath.exp(-0.5j * math.pi * nu) * bessel_k(nu, x)
