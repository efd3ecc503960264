"""
Generalized eigenfunctions on the critical channels and boundary-data extraction.

A wavefunction is assembled from two radial amplitudes: the coefficient of
e^{-i theta} (channel 1, m = -1) and the constant term (channel 2, m = 0). Near the
origin each amplitude behaves like Phi_1 r^{-nu} + Phi_2 r^{nu}; the boundary
condition of the extension is Phi_1 = Lambda Phi_2.
"""

import cmath
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from abflux.errors import DomainError, FitFailure
from abflux.params import Flux, LambdaParams, lambda_matrix
from abflux.scattering import coefficient_matrix, det_n, n_matrix
from abflux.specialfn import bessel_j

logger = logging.getLogger(__name__)

FIT_TOLERANCE = 1e-6
MIN_RADII = 8
MIN_ANGLES = 64
DEFAULT_RADII = tuple(np.logspace(-6.0, -3.0, 12).tolist())

ChannelFunction = Callable[[float], tuple[complex, complex]]


@dataclass(frozen=True)
class WaveSample:
    r: float
    theta: float
    value: complex


@dataclass(frozen=True, eq=False)
class SampledWave:
    """Wavefunction values on a polar grid; values[i, j] sits at (radii[i], thetas[j])."""

    radii: np.ndarray = field(repr=False)
    thetas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def samples(self) -> list[WaveSample]:
        return [
            WaveSample(r=float(r), theta=float(t), value=complex(self.values[i, j]))
            for i, r in enumerate(self.radii)
            for j, t in enumerate(self.thetas)
        ]


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Singular (phi1) and regular (phi2) coefficients, channel ordered."""

    phi1: np.ndarray
    phi2: np.ndarray
    residual: float = 0.0


def _check_which(which: int) -> None:
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which!r}")


def _check_radius(r: float) -> float:
    r = float(r)
    if not (r > 0.0) or not math.isfinite(r):
        raise DomainError(f"r must be positive and finite, got {r!r}")
    return r


def _bessels(flux: Flux, x: float) -> tuple[float, float, float, float]:
    """J_{alpha-1}, J_{1-alpha}, J_{-alpha}, J_alpha at x."""
    a = flux.alpha
    return bessel_j(a - 1.0, x), bessel_j(1.0 - a, x), bessel_j(-a, x), bessel_j(a, x)


# =============================================================================
# b and g solutions
# =============================================================================


def b_channels(
    flux: Flux, lam: LambdaParams, which: int, k: float, r: float
) -> tuple[complex, complex]:
    """Radial amplitudes of b_1 or b_2."""
    _check_which(which)
    r = _check_radius(r)
    coeffs = coefficient_matrix(flux, lam, k)
    j_sing1, j_reg1, j_sing2, j_reg2 = _bessels(flux, k * r)
    if which == 1:
        return coeffs[0, 0] * j_sing1 + j_reg1, coeffs[1, 0] * j_sing2
    return coeffs[0, 1] * j_sing1, coeffs[1, 1] * j_sing2 + j_reg2


def b_solution(
    flux: Flux, lam: LambdaParams, which: int, k: float, r: float, theta: float
) -> complex:
    first, second = b_channels(flux, lam, which, k, r)
    return complex(first * cmath.exp(-1j * theta) + second)


def g_channels(
    flux: Flux, lam: LambdaParams, which: int, k: float, r: float
) -> tuple[complex, complex]:
    """Radial amplitudes of the normalised solutions g = B N^{-1}, entry by entry."""
    _check_which(which)
    r = _check_radius(r)
    coeffs = coefficient_matrix(flux, lam, k)
    xi1, xi2 = coeffs[0]
    eta1, eta2 = coeffs[1]
    e = cmath.exp(1j * math.pi * flux.alpha)
    det = det_n(flux, lam, k)
    cross = xi1 * eta2 - xi2 * eta1
    j_sing1, j_reg1, j_sing2, j_reg2 = _bessels(flux, k * r)
    if which == 1:
        first = (cross + xi1 * e) * j_sing1 + (eta2 + e) * j_reg1
        second = -eta1 * j_reg2 + eta1 * e * j_sing2
    else:
        first = -xi2 / e * j_sing1 - xi2 * j_reg1
        second = (xi1 - 1.0 / e) * j_reg2 + (cross - eta2 / e) * j_sing2
    return complex(first / det), complex(second / det)


def g_solution(
    flux: Flux, lam: LambdaParams, which: int, k: float, r: float, theta: float
) -> complex:
    first, second = g_channels(flux, lam, which, k, r)
    return first * cmath.exp(-1j * theta) + second


def g_solution_matrix_path(
    flux: Flux, lam: LambdaParams, which: int, k: float, r: float, theta: float
) -> complex:
    """g_which as column `which` of B(k) N(k)^{-1}, by explicit inversion."""
    _check_which(which)
    n_inverse = np.linalg.inv(n_matrix(flux, lam, k))
    b1 = b_solution(flux, lam, 1, k, r, theta)
    b2 = b_solution(flux, lam, 2, k, r, theta)
    return complex(b1 * n_inverse[0, which - 1] + b2 * n_inverse[1, which - 1])


# =============================================================================
# Boundary data
# =============================================================================


def sample_wavefunction(
    func: Callable[[float, float], complex],
    radii: Sequence[float] = DEFAULT_RADII,
    n_theta: int = MIN_ANGLES,
) -> SampledWave:
    """Evaluate psi(r, theta) on radii x a uniform grid of n_theta angles."""
    radii_arr = np.asarray(radii, dtype=float)
    thetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
    values = np.array(
        [[func(float(r), float(t)) for t in thetas] for r in radii_arr], dtype=complex
    )
    return SampledWave(radii=radii_arr, thetas=thetas, values=values)


def sample_channel_wavefunction(
    channels: ChannelFunction,
    radii: Sequence[float] = DEFAULT_RADII,
    n_theta: int = MIN_ANGLES,
) -> SampledWave:
    """Like sample_wavefunction, for psi = c1(r) e^{-i theta} + c2(r) given by its amplitudes."""
    radii_arr = np.asarray(radii, dtype=float)
    thetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
    amplitudes = np.array([channels(float(r)) for r in radii_arr], dtype=complex)
    values = amplitudes[:, :1] * np.exp(-1j * thetas)[None, :] + amplitudes[:, 1:]
    return SampledWave(radii=radii_arr, thetas=thetas, values=values)


def _frobenius(order: float, energy: float, radii: np.ndarray) -> np.ndarray:
    """sum_j c_j r^{2j}, c_0 = 1, of the solution r^order (1 + ...) at energy E."""
    r2 = radii * radii
    term = np.ones_like(radii)
    total = term.copy()
    for j in range(1, 60):
        term = term * (-energy * r2) / (4.0 * j * (j + order))
        total = total + term
        if np.max(np.abs(term)) <= 1e-17 * np.min(np.abs(total)):
            break
    return total


def _fit_channel(
    nu: float, energy: float, radii: np.ndarray, coefficient: np.ndarray
) -> tuple[complex, complex, float, float]:
    """Least squares for coefficient(r) = c_- phi_-(r) + c_+ phi_+(r), rows scaled by r^nu.

    Returns both coefficients, the residual norm and the norm of the scaled target.
    """
    singular = _frobenius(-nu, energy, radii)
    regular = radii ** (2.0 * nu) * _frobenius(nu, energy, radii)
    target = coefficient * radii**nu
    design = np.column_stack([singular, regular]).astype(complex)
    solution, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = float(np.linalg.norm(design @ solution - target))
    return complex(solution[0]), complex(solution[1]), residual, float(np.linalg.norm(target))


def extract_boundary_data(flux: Flux, samples: SampledWave, energy: float = 0.0) -> BoundaryData:
    """Fit the small-r expansion of both angular projections.

    The e^{-i theta} coefficient is the mean of psi e^{i theta} over the angle grid,
    the constant coefficient the mean of psi.

    Raises:
        DomainError: fewer than 8 radii, fewer than 64 angles or non-positive radii
        FitFailure: if a fit residual, relative to the larger channel, exceeds 1e-6
    """
    radii = np.asarray(samples.radii, dtype=float)
    if radii.size < MIN_RADII or samples.thetas.size < MIN_ANGLES:
        raise DomainError(
            f"Need at least {MIN_RADII} radii and {MIN_ANGLES} angles, "
            f"got {radii.size} and {samples.thetas.size}"
        )
    if np.any(radii <= 0.0):
        raise DomainError("Sample radii must be positive")

    first = np.mean(samples.values * np.exp(1j * samples.thetas)[None, :], axis=1)
    second = np.mean(samples.values, axis=1)

    phi1 = np.zeros(2, dtype=complex)
    phi2 = np.zeros(2, dtype=complex)
    residuals = []
    sizes = []
    for index, (nu, coefficient) in enumerate(zip(flux.orders, (first, second), strict=True)):
        phi1[index], phi2[index], residual, size = _fit_channel(nu, energy, radii, coefficient)
        residuals.append(residual)
        sizes.append(size)
    # A channel the wave does not populate only carries rounding noise.
    reference = max(sizes)
    worst = max(residuals) / reference if reference > 0.0 else 0.0
    if worst > FIT_TOLERANCE:
        raise FitFailure(f"Small-r fit residual {worst:.3e} exceeds {FIT_TOLERANCE:g}")
    logger.debug(f"Boundary data phi1={phi1}, phi2={phi2}, residual={worst:.3e}")
    return BoundaryData(phi1=phi1, phi2=phi2, residual=worst)


def boundary_condition_residual(flux: Flux, lam: LambdaParams, data: BoundaryData) -> float:
    """|Phi_1 - Lambda Phi_2| / (|Phi_1| + max(1, |Lambda|) |Phi_2|)."""
    matrix = lambda_matrix(flux, lam)
    gap = np.linalg.norm(data.phi1 - matrix @ data.phi2)
    lam_norm = max(1.0, float(np.linalg.norm(matrix, 2)))
    scale = np.linalg.norm(data.phi1) + lam_norm * np.linalg.norm(data.phi2)
    return float(gap / scale) if scale > 0.0 else 0.0
