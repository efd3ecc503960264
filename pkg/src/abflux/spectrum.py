"""
Discrete spectrum of the point interaction.

Bound states sit at E = -p^2 where the spectral function F(p) equals |w|^2. The
search works on the scaled residual

    h(p) = (p/2)^2 (F(p) - |w|^2)
         = det(1 + Gamma(1 - D) Gamma(1 + D)^{-1} (p/2)^{2D} Lambda),

which is finite at both ends of the half line, and scans it in ln p. The zeros of
the two factors of F split the axis into intervals holding at most one root each.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from abflux.errors import (
    DegenerateDenominator,
    DomainError,
    NotAnEigenvalue,
    NotInvertible,
    RootFindingError,
)
from abflux.params import (
    Flux,
    LambdaParams,
    UParams,
    lambda_matrix,
    normalization_constants,
    require_chart,
    unitary_matrix,
)
from abflux.specialfn import bessel_k, branch_power, gamma_real, hankel1_imaginary

logger = logging.getLogger(__name__)

SCAN_WINDOW = (-30.0, 30.0)
SCAN_LIMIT = 300.0
SCAN_PANELS = 600
ROOT_XTOL = 1e-14
DOUBLE_ROOT_LOG_GAP = 1e-9
DOUBLE_ROOT_TOLERANCE = 1e-10
ZERO_RESIDUAL = 1e-12
SINGULAR_RATIO = 1e-6
QUOTIENT_MERGE = 1e-8
UNIT_SHIFT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BoundState:
    """Eigenvalue -p^2 with channel coefficients of the L^2-normalised eigenfunction."""

    p: float
    xi: complex
    eta: complex
    multiplicity: int = 1

    @property
    def energy(self) -> float:
        return -self.p * self.p

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "energy": self.energy,
            "xi": [self.xi.real, self.xi.imag],
            "eta": [self.eta.real, self.eta.imag],
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue count (with multiplicity) and the distinct bound states."""

    count: int
    states: tuple[BoundState, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {"count": self.count, "states": [state.to_dict() for state in self.states]}


def _check_momentum(p: float) -> float:
    p = float(p)
    if not (p > 0.0) or not math.isfinite(p):
        raise DomainError(f"p must be positive and finite, got {p!r}")
    return p


# =============================================================================
# Spectral condition
# =============================================================================


def spectral_function(flux: Flux, lam: LambdaParams, p: float) -> float:
    """F(p) = ((p/2)^{2 alpha - 2} + G_1 u) ((p/2)^{-2 alpha} + G_2 v)."""
    t = 0.5 * _check_momentum(p)
    a = flux.alpha
    g1, g2 = flux.gamma_ratios
    return (t ** (2.0 * a - 2.0) + g1 * lam.u) * (t ** (-2.0 * a) + g2 * lam.v)


def _residual_terms(flux: Flux, lam: LambdaParams, s: float) -> tuple[float, float, float]:
    """The three p-dependent terms of h at p = e^s."""
    a = flux.alpha
    g1, g2 = flux.gamma_ratios
    log_t = s - math.log(2.0)
    first = g1 * lam.u * math.exp((2.0 - 2.0 * a) * log_t)
    second = g2 * lam.v * math.exp(2.0 * a * log_t)
    coupling = lam.u * lam.v / (a * (1.0 - a)) - lam.w_abs2
    third = coupling * math.exp(2.0 * log_t)
    return first, second, third


def _log_residual(flux: Flux, lam: LambdaParams, s: float) -> float:
    first, second, third = _residual_terms(flux, lam, s)
    return 1.0 + first + second + third


def _residual_scale(flux: Flux, lam: LambdaParams, s: float) -> float:
    first, second, third = _residual_terms(flux, lam, s)
    return 1.0 + abs(first) + abs(second) + abs(third)


def spectral_residual(flux: Flux, lam: LambdaParams, p: float) -> float:
    """h(p) = (p/2)^2 (F(p) - |w|^2); vanishes exactly at the bound states."""
    return _log_residual(flux, lam, math.log(_check_momentum(p)))


def scaled_residual(flux: Flux, lam: LambdaParams, p: float) -> float:
    """|h(p)| relative to the sum of the magnitudes of its terms."""
    s = math.log(_check_momentum(p))
    return abs(_log_residual(flux, lam, s)) / _residual_scale(flux, lam, s)


def count_bound_states(lam: LambdaParams, flux: Flux) -> int:
    """Number of eigenvalues, with multiplicity, from the signs of u, v and det Lambda."""
    det = lam.det(flux)
    if lam.u < 0.0 and lam.v < 0.0 and det > 0.0:
        return 2
    if lam.u >= 0.0 and lam.v >= 0.0 and det >= 0.0:
        return 0
    return 1


def _factor_root_logs(flux: Flux, lam: LambdaParams) -> tuple[float | None, float | None]:
    a = flux.alpha
    g1, g2 = flux.gamma_ratios
    log_u = None
    log_v = None
    if lam.u < 0.0:
        log_u = math.log(2.0) - math.log(-g1 * lam.u) / (2.0 - 2.0 * a)
    if lam.v < 0.0:
        log_v = math.log(2.0) - math.log(-g2 * lam.v) / (2.0 * a)
    return log_u, log_v


def factor_roots(flux: Flux, lam: LambdaParams) -> tuple[float | None, float | None]:
    """Zeros of the two factors of F: p_u for u < 0 and p_v for v < 0, else None.

    For w = 0 these are the bound states themselves.
    """
    return tuple(  # type: ignore[return-value]
        None if s is None else (math.exp(s) if s < 700.0 else math.inf)
        for s in _factor_root_logs(flux, lam)
    )


# =============================================================================
# Root search
# =============================================================================


def _bracket_roots(
    flux: Flux, lam: LambdaParams, lo: float, hi: float, nodes: list[float]
) -> list[float]:
    grid = np.linspace(lo, hi, SCAN_PANELS + 1)
    grid = np.unique(np.concatenate([grid, [n for n in nodes if lo < n < hi]]))
    values = [_log_residual(flux, lam, float(s)) for s in grid]

    def residual(s: float) -> float:
        return _log_residual(flux, lam, s)

    roots: list[float] = []
    for i in range(len(grid) - 1):
        left, right = float(grid[i]), float(grid[i + 1])
        f_left, f_right = values[i], values[i + 1]
        if f_left == 0.0:
            roots.append(left)
        elif f_left * f_right < 0.0:
            roots.append(brentq(residual, left, right, xtol=ROOT_XTOL))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))

    # A factor zero where |w|^2 (p/2)^2 is below rounding is itself a root.
    for node in nodes:
        if not lo < node < hi or any(abs(node - r) < 1e-6 for r in roots):
            continue
        if abs(residual(node)) <= ZERO_RESIDUAL * _residual_scale(flux, lam, node):
            roots.append(node)
    return sorted(roots)


def _tangent_root(flux: Flux, lam: LambdaParams, nodes: list[float]) -> float | None:
    """Minimise h between the factor zeros; return ln p of an accepted double root."""
    if not nodes:
        return None
    lo, hi = min(nodes) - 1.0, max(nodes) + 1.0
    result = minimize_scalar(
        lambda s: _log_residual(flux, lam, s),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    s = float(result.x)
    if abs(_log_residual(flux, lam, s)) <= DOUBLE_ROOT_TOLERANCE * _residual_scale(flux, lam, s):
        return s
    return None


def _scan_roots(flux: Flux, lam: LambdaParams, expected: int) -> list[tuple[float, int]]:
    nodes = [s for s in _factor_root_logs(flux, lam) if s is not None]
    lo, hi = SCAN_WINDOW
    for node in nodes:
        lo, hi = min(lo, node - 2.0), max(hi, node + 2.0)
    lo, hi = max(lo, -SCAN_LIMIT), min(hi, SCAN_LIMIT)

    while True:
        roots = _bracket_roots(flux, lam, lo, hi, nodes)
        if len(roots) >= expected or (lo <= -SCAN_LIMIT and hi >= SCAN_LIMIT):
            break
        lo, hi = max(2.0 * lo, -SCAN_LIMIT), min(2.0 * hi, SCAN_LIMIT)
        logger.debug(f"Widening ln p window to [{lo:g}, {hi:g}], {len(roots)} of {expected} roots")

    if len(roots) == expected:
        return [(s, 1) for s in roots]
    if expected == 2 and len(roots) < 2:
        tangent = _tangent_root(flux, lam, nodes)
        if tangent is not None:
            logger.warning(f"Accepting double root at p={math.exp(tangent):.6g} by minimisation")
            return [(tangent, 2)]
    raise RootFindingError(
        f"Found {len(roots)} roots in ln p in [{lo:g}, {hi:g}], expected {expected} "
        f"(alpha={flux.alpha!r}, u={lam.u!r}, v={lam.v!r}, w={lam.w!r})"
    )


def _decoupled_roots(flux: Flux, lam: LambdaParams) -> list[tuple[float, int, int]]:
    """Roots (ln p, multiplicity, channel) for w = 0."""
    log_u, log_v = _factor_root_logs(flux, lam)
    if log_u is not None and log_v is not None and abs(log_u - log_v) < DOUBLE_ROOT_LOG_GAP:
        return [(0.5 * (log_u + log_v), 2, 1)]
    found = [(s, 1, channel) for channel, s in ((1, log_u), (2, log_v)) if s is not None]
    return sorted(found)


def find_bound_states(flux: Flux, lam: LambdaParams) -> SpectrumReport:
    """All bound states, ordered by increasing p.

    Raises:
        RootFindingError: if the scan cannot reproduce the expected count, or a root
            lies beyond |ln p| = SCAN_LIMIT
    """
    expected = count_bound_states(lam, flux)
    if expected == 0:
        return SpectrumReport(count=0)

    if lam.w == 0:
        roots = _decoupled_roots(flux, lam)
    else:
        roots = [(s, mult, 1) for s, mult in _scan_roots(flux, lam, expected)]
    for s, _, _ in roots:
        if abs(s) > SCAN_LIMIT:
            raise RootFindingError(
                f"Bound state at ln p = {s:.6g} is outside the supported range "
                f"[{-SCAN_LIMIT:g}, {SCAN_LIMIT:g}] "
                f"(alpha={flux.alpha!r}, u={lam.u!r}, v={lam.v!r})"
            )

    states = tuple(
        _bound_state(flux, lam, math.exp(s), mult, channel) for s, mult, channel in roots
    )
    found = sum(state.multiplicity for state in states)
    if found != expected:
        raise RootFindingError(f"Found {found} eigenvalues, expected {expected}")

    logger.info(
        f"alpha={flux.alpha:.6g}: {expected} bound state(s) at p="
        f"{', '.join(f'{state.p:.12g}' for state in states)}"
    )
    return SpectrumReport(count=expected, states=states)


def closed_form_half_flux(lam: LambdaParams) -> list[float]:
    """Positive roots at alpha = 1/2, where h is a quadratic in p.

    A double root is listed twice.

    Raises:
        DegenerateDenominator: when ||w|^2/4 - uv| < 1e-12
    """
    half_den = 0.25 * lam.w_abs2 - lam.u * lam.v
    if abs(half_den) < 1e-12:
        raise DegenerateDenominator(f"|w|^2/4 - uv = {half_den:.3e}; use find_bound_states")
    root = math.sqrt(lam.w_abs2 + (lam.u - lam.v) ** 2)
    total = lam.u + lam.v
    candidates = [(total + root) / (2.0 * half_den), (total - root) / (2.0 * half_den)]
    return sorted(p for p in candidates if p > 0.0)


# =============================================================================
# Eigenvectors and eigenfunctions
# =============================================================================


def _eigen_matrix(flux: Flux, lam: LambdaParams, p: float) -> np.ndarray:
    """I + (ip/2)^D Gamma(1 - D) Lambda Gamma(1 + D)^{-1} e^{-i pi D} (ip/2)^D."""
    nu = flux.orders
    power = np.diag([branch_power(0.5j * p, n) for n in nu])
    left = np.diag([gamma_real(1.0 - n) for n in nu])
    right = np.diag([cmath.exp(-1j * math.pi * n) / gamma_real(1.0 + n) for n in nu])
    return np.eye(2) + power @ left @ lambda_matrix(flux, lam) @ right @ power


def eigen_coefficients(
    flux: Flux, lam: LambdaParams, p: float, channel: int | None = None
) -> tuple[complex, complex]:
    """Unit null vector (xi, eta) of the boundary-condition system at p.

    The larger component is made real and positive. When the null space is
    two-dimensional (double root at w = 0) the basis vector of `channel`
    (1 or 2, default 1) is returned.

    Raises:
        NotAnEigenvalue: if the smallest singular value exceeds 1e-6 times the largest
    """
    p = _check_momentum(p)
    matrix = _eigen_matrix(flux, lam, p)
    _, sv, vh = np.linalg.svd(matrix)
    scale = max(1.0, float(np.linalg.norm(matrix - np.eye(2))))
    if sv[0] <= SINGULAR_RATIO * scale:
        return (1 + 0j, 0j) if channel in (None, 1) else (0j, 1 + 0j)
    if sv[1] > SINGULAR_RATIO * sv[0]:
        raise NotAnEigenvalue(
            f"p={p!r} is not an eigenvalue: singular values {sv[0]:.3e}, {sv[1]:.3e}"
        )

    null = vh[1].conj()
    pivot = null[int(np.argmax(np.abs(null)))]
    null = null * (abs(pivot) / pivot)
    return complex(null[0]), complex(null[1])


def radial_norm_closed(nu: float, p: float) -> float:
    """Integral of K_nu(pr)^2 r dr over (0, inf), equal to pi nu / (2 p^2 sin(pi nu))."""
    p = _check_momentum(p)
    if nu == 0.0:
        return 0.5 / (p * p)
    return math.pi * nu / (2.0 * p * p * math.sin(math.pi * nu))


def radial_norm_quadrature(nu: float, p: float) -> float:
    """The same integral by adaptive quadrature on (0, 40/p]; the tail is below e^{-80}."""
    p = _check_momentum(p)

    def density(r: float) -> float:
        return bessel_k(nu, p * r) ** 2 * r if r > 0.0 else 0.0

    near, _ = quad(density, 0.0, 1.0 / p, limit=200)
    far, _ = quad(density, 1.0 / p, 40.0 / p, limit=200)
    return near + far


def bound_state_norm(flux: Flux, p: float, xi: complex, eta: complex) -> float:
    """L^2 norm of xi H_{1-alpha}(ipr) e^{-i theta} + eta H_alpha(ipr) over the plane."""
    total = 0.0
    for coeff, nu in zip((xi, eta), flux.orders, strict=True):
        if coeff != 0:
            # |H_nu(ipr)|^2 = (4 / pi^2) K_nu(pr)^2; the angular integral gives 2 pi.
            total += abs(coeff) ** 2 * (8.0 / math.pi) * radial_norm_closed(nu, p)
    return math.sqrt(total)


def _bound_state(
    flux: Flux, lam: LambdaParams, p: float, multiplicity: int, channel: int
) -> BoundState:
    xi, eta = eigen_coefficients(flux, lam, p, channel=channel)
    norm = bound_state_norm(flux, p, xi, eta)
    return BoundState(p=p, xi=xi / norm, eta=eta / norm, multiplicity=multiplicity)


def eigenfunction_radial(flux: Flux, state: BoundState, r: float) -> tuple[complex, complex]:
    """Channel amplitudes (xi H_{1-alpha}(ipr), eta H_alpha(ipr)) at radius r."""
    r = float(r)
    if not (r > 0.0):
        raise DomainError(f"r must be positive, got {r!r}")
    x = state.p * r
    nu1, nu2 = flux.orders
    first = state.xi * hankel1_imaginary(nu1, x) if state.xi != 0 else 0j
    second = state.eta * hankel1_imaginary(nu2, x) if state.eta != 0 else 0j
    return complex(first), complex(second)


def eigenfunction_value(flux: Flux, state: BoundState, r: float, theta: float) -> complex:
    """psi(r, theta) = first channel e^{-i theta} + second channel."""
    first, second = eigenfunction_radial(flux, state, r)
    return first * cmath.exp(-1j * theta) + second


# =============================================================================
# Krein determinant
# =============================================================================


def _check_resolvent_point(z: complex) -> complex:
    z = complex(z)
    if not cmath.isfinite(z) or (z.imag == 0.0 and z.real >= 0.0):
        raise DomainError(f"z must be finite and off the half line [0, inf), got {z!r}")
    return z


def _power_quotient(x: complex, y: complex, nu: float) -> complex:
    """(x^nu - y^nu) / (x - y) with principal powers, continued to x = y."""
    gap = x - y
    if abs(gap) <= QUOTIENT_MERGE * abs(y):
        return nu * y ** (nu - 1.0) * (1.0 + 0.5 * (nu - 1.0) * gap / y)
    return (x**nu - y**nu) / gap


def p_matrix(flux: Flux, z: complex, z_prime: complex) -> np.ndarray:
    """Gram matrix P(z, z') of the deficiency solutions at z and z'.

    P is diagonal with entries 4 N_l^2 / sin(pi nu_l) ((-conj z)^nu_l - (-z')^nu_l)
    / (z' - conj z), nu = (1 - alpha, alpha). It is Hermitian in the sense
    P(z', z) = P(z, z')^* and P(i, i) = P(-i, -i) = I.

    Raises:
        DomainError: when z or z' lies on [0, inf)
    """
    x = -_check_resolvent_point(z).conjugate()
    y = -_check_resolvent_point(z_prime)
    weights = normalization_constants(flux)
    entries = [
        4.0 * n * n / math.sin(math.pi * nu) * _power_quotient(x, y, nu)
        for n, nu in zip(weights, flux.orders, strict=True)
    ]
    return np.diag(np.array(entries, dtype=complex))


def krein_inverse(flux: Flux, up: UParams, z: complex) -> np.ndarray:
    """M_z^{-1} = 2i P(i, i) (U + 1)^{-1} - (z + i) P(conj z, -i).

    Its determinant vanishes exactly at the eigenvalues z = -p^2.

    Raises:
        DomainError: when z lies on [0, inf)
        NotInvertible: when U has the eigenvalue -1
    """
    z = _check_resolvent_point(z)
    shifted = unitary_matrix(up) + np.eye(2)
    det_shifted = np.linalg.det(shifted)
    if abs(det_shifted) <= UNIT_SHIFT_TOLERANCE:
        raise NotInvertible(f"|det(U + 1)| = {abs(det_shifted):.3e}; U has the eigenvalue -1")
    return 2j * p_matrix(flux, 1j, 1j) @ np.linalg.inv(shifted) - (z + 1j) * p_matrix(
        flux, z.conjugate(), -1j
    )


def _krein_matrix(flux: Flux, up: UParams, p: float) -> np.ndarray:
    """sin(pi D / 2) M_z^{-1} (U + 1) at z = -p^2, defined for every U."""
    z = complex(-p * p, 0.0)
    nu = np.array(flux.orders)
    shifted = unitary_matrix(up) + np.eye(2)
    inner = 2j * p_matrix(flux, 1j, 1j) - (z + 1j) * p_matrix(flux, z.conjugate(), -1j) @ shifted
    return np.diag(np.sin(0.5 * math.pi * nu)) @ inner


def krein_det(flux: Flux, up: UParams, p: float) -> complex:
    """det(p^{2D}(U + 1) - e^{i pi D / 2} U - e^{-i pi D / 2}); zero exactly at bound states.

    Equal to det(sin(pi D / 2)) det(M_z^{-1}) det(U + 1) at z = -p^2.
    """
    p = _check_momentum(p)
    return complex(np.linalg.det(_krein_matrix(flux, up, p)))


def krein_residual(flux: Flux, up: UParams, p: float) -> float:
    """|krein_det| divided by the product of the row norms of the Krein matrix."""
    p = _check_momentum(p)
    matrix = _krein_matrix(flux, up, p)
    rows = np.linalg.norm(matrix, axis=1)
    return float(abs(np.linalg.det(matrix)) / (rows[0] * rows[1]))


def krein_det_normalized(flux: Flux, up: UParams, p: float) -> complex:
    """krein_det over its p -> 0 limit det(e^{i pi D / 2} U + e^{-i pi D / 2}).

    On the Lambda chart this equals spectral_residual(u_to_lambda(up), p).

    Raises:
        NotInvertible: when the limit vanishes, i.e. |d| <= 1e-10
    """
    require_chart(flux, up)
    nu = np.array(flux.orders)
    phase = np.diag(np.exp(0.5j * math.pi * nu))
    limit = np.linalg.det(phase @ unitary_matrix(up) + phase.conj())
    return krein_det(flux, up, p) / complex(limit)


def count_krein_roots(
    flux: Flux, up: UParams, window: tuple[float, float] = SCAN_WINDOW, panels: int = SCAN_PANELS
) -> int:
    """Sign changes of the real normalised Krein determinant on a ln p grid."""
    grid = np.linspace(window[0], window[1], panels + 1)
    values = np.array([krein_det_normalized(flux, up, math.exp(s)).real for s in grid])
    return int(np.count_nonzero(values[:-1] * values[1:] < 0.0))
