"""
Scattering on the two critical channels and the full angular kernel.

Channel order everywhere: index 0 is m = -1 (the e^{-i theta} sector), index 1 is
m = 0. All other channels scatter as for the pure flux with phases e^{2i delta_m}.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from abflux.errors import DomainError, ForwardDirection
from abflux.params import Flux, LambdaParams
from abflux.specialfn import branch_power, gamma_real

logger = logging.getLogger(__name__)

KERNEL_CONE = 1e-8
CRITICAL_CHANNELS = (-1, 0)


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """2x2 complex matrix on the critical channels at momentum k."""

    k: float
    entries: np.ndarray = field(repr=False)

    @property
    def unitarity_deficit(self) -> float:
        return unitarity_deficit(self.entries)

    def to_dict(self) -> dict[str, Any]:
        flat = self.entries.reshape(-1)
        return {"k": self.k, "entries": [[z.real, z.imag] for z in flat.tolist()]}


@dataclass(frozen=True)
class KernelSample:
    """Smooth part of S(k; theta, theta0); the forward delta weight is kept apart."""

    k: float
    theta: float
    theta0: float
    value: complex
    delta_coefficient: float

    @property
    def dsigma_dtheta(self) -> float:
        return 2.0 * math.pi / self.k * abs(self.value) ** 2

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "theta": self.theta,
            "theta0": self.theta0,
            "value": [self.value.real, self.value.imag],
            "delta_coefficient": self.delta_coefficient,
            "dsigma_dtheta": self.dsigma_dtheta,
        }


def _check_k(k: float) -> float:
    k = float(k)
    if not (k > 0.0) or not math.isfinite(k):
        raise DomainError(f"k must be positive and finite, got {k!r}")
    return k


def unitarity_deficit(matrix: np.ndarray) -> float:
    """max |(M^* M - I)_{jk}|."""
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))


# =============================================================================
# N(k) and its determinant
# =============================================================================


def _coefficients(flux: Flux, lam: LambdaParams, k: complex) -> tuple[complex, complex, complex]:
    """(xi_1, eta_2, coupling k^2/4) with powers of k on the [0, 2 pi) branch."""
    a = flux.alpha
    g1, g2 = flux.gamma_ratios
    half = 0.5 * k
    xi1 = lam.u * g1 * branch_power(half, 2.0 - 2.0 * a)
    eta2 = lam.v * g2 * branch_power(half, 2.0 * a)
    coupling = (lam.u * lam.v / (a * (1.0 - a)) - lam.w_abs2) * half * half
    return xi1, eta2, coupling


def coefficient_matrix(flux: Flux, lam: LambdaParams, k: float) -> np.ndarray:
    """[[xi_1, xi_2], [eta_1, eta_2]] of the generalized eigenfunctions b_1, b_2."""
    k = _check_k(k)
    a = flux.alpha
    g1, g2 = flux.gamma_ratios
    half = 0.5 * k
    return np.array(
        [
            [lam.u * g1 * half ** (2.0 - 2.0 * a), lam.w.conjugate() * half],
            [lam.w * half, lam.v * g2 * half ** (2.0 * a)],
        ],
        dtype=complex,
    )


def n_matrix(flux: Flux, lam: LambdaParams, k: float) -> np.ndarray:
    """N(k) = coefficient_matrix + e^{i pi D}."""
    phases = np.exp(1j * math.pi * np.array(flux.orders))
    return coefficient_matrix(flux, lam, k) + np.diag(phases)


def n_tilde_matrix(flux: Flux, lam: LambdaParams, k: float) -> np.ndarray:
    """N~(k) = coefficient_matrix + e^{-i pi D}."""
    phases = np.exp(-1j * math.pi * np.array(flux.orders))
    return coefficient_matrix(flux, lam, k) + np.diag(phases)


def _det_n(flux: Flux, lam: LambdaParams, k: complex) -> complex:
    phase = cmath.exp(1j * math.pi * flux.alpha)
    xi1, eta2, coupling = _coefficients(flux, lam, k)
    return coupling + xi1 * phase - eta2 / phase - 1.0


def det_n(flux: Flux, lam: LambdaParams, k: float) -> complex:
    """Closed form of det N(k); never zero for k > 0."""
    return _det_n(flux, lam, _check_k(k))


def det_n_continued(flux: Flux, lam: LambdaParams, p: float) -> complex:
    """det N at k = ip; equals minus spectral_residual(p), so it vanishes at bound states."""
    p = float(p)
    if not (p > 0.0):
        raise DomainError(f"p must be positive, got {p!r}")
    return _det_n(flux, lam, 1j * p)


# =============================================================================
# Channel scattering matrix
# =============================================================================


def omega_minus(flux: Flux) -> np.ndarray:
    """diag(-e^{-i pi alpha / 2}, e^{i pi alpha / 2})."""
    h = 0.5 * math.pi * flux.alpha
    return np.diag([-cmath.exp(-1j * h), cmath.exp(1j * h)])


def omega_plus(flux: Flux, lam: LambdaParams, k: float) -> np.ndarray:
    """Omega_+(k) from Omega_+^{-1} = Omega_- N~(k) N(k)^{-1}."""
    n_inverse = np.linalg.inv(n_matrix(flux, lam, k))
    return np.linalg.inv(omega_minus(flux) @ n_tilde_matrix(flux, lam, k) @ n_inverse)


def sigma(flux: Flux, lam: LambdaParams, k: float) -> ChannelMatrix:
    """Channel scattering matrix from its explicit entries."""
    k = _check_k(k)
    phase = cmath.exp(1j * math.pi * flux.alpha)
    xi1, eta2, coupling = _coefficients(flux, lam, k)
    det = coupling + xi1 * phase - eta2 / phase - 1.0
    off = -1j * math.sin(math.pi * flux.alpha) * k
    entries = np.array(
        [
            [coupling / phase + xi1 - eta2 - phase, off * lam.w.conjugate()],
            [off * lam.w, coupling * phase + xi1 - eta2 - 1.0 / phase],
        ],
        dtype=complex,
    )
    return ChannelMatrix(k=k, entries=entries / det)


def sigma_from_omegas(flux: Flux, lam: LambdaParams, k: float) -> np.ndarray:
    """Omega_+^* Omega_-, the second way of assembling the channel matrix."""
    return omega_plus(flux, lam, k).conj().T @ omega_minus(flux)


def sigma_special_case(
    flux: Flux, lam: LambdaParams, k: float, case: str | None = None
) -> np.ndarray:
    """Reduced formulas for w = 0 ("conserved"), u = v = 0 ("coupling") or alpha = 1/2 ("half").

    Without `case`, the first one that applies is used.

    Raises:
        DomainError: when the parameters fit none of the reductions
    """
    k = _check_k(k)
    a = flux.alpha
    if case is None:
        if lam.w == 0:
            case = "conserved"
        elif lam.u == 0.0 and lam.v == 0.0:
            case = "coupling"
        elif a == 0.5:
            case = "half"
        else:
            raise DomainError("No reduced formula applies to these parameters")

    e = cmath.exp(1j * math.pi * a)
    if case == "conserved":
        if lam.w != 0:
            raise DomainError("The conserved reduction needs w = 0")
        x = lam.u * gamma_real(a) * (0.5 * k) ** (2.0 - 2.0 * a)
        y = lam.v * gamma_real(1.0 - a) * (0.5 * k) ** (2.0 * a)
        g_first, g_second = gamma_real(2.0 - a), gamma_real(1.0 + a)
        return np.diag(
            [
                (x - e * g_first) / (e * x - g_first),
                (y + g_second / e) / (y / e + g_second),
            ]
        )
    if case == "coupling":
        if lam.u != 0.0 or lam.v != 0.0:
            raise DomainError("The coupling reduction needs u = v = 0")
        quarter = lam.w_abs2 * k * k / 4.0
        s = 1j * math.sin(math.pi * a) * k
        q = quarter + 1.0
        return np.array(
            [[quarter / e + e, s * lam.w.conjugate()], [s * lam.w, quarter * e + 1.0 / e]],
            dtype=complex,
        ) / q
    if case == "half":
        if a != 0.5:
            raise DomainError("The half-flux reduction needs alpha = 1/2")
        c = lam.u * lam.v - lam.w_abs2 / 4.0
        q = -1.0 + c * k * k + 1j * (lam.u + lam.v) * k
        diff = (lam.u - lam.v) * k
        return np.array(
            [
                [-1j - 1j * c * k * k + diff, -1j * lam.w.conjugate() * k],
                [-1j * lam.w * k, 1j + 1j * c * k * k + diff],
            ],
            dtype=complex,
        ) / q
    raise DomainError(f"Unknown reduction {case!r}")


# =============================================================================
# Angular representation
# =============================================================================


def partial_wave_phase(flux: Flux, m: int) -> float:
    """Pure-flux phase shift delta_m = (|m| - |m + alpha|) pi / 2."""
    return 0.5 * math.pi * (abs(m) - abs(m + flux.alpha))


def angular_matrix_element(flux: Flux, lam: LambdaParams, k: float, m: int, n: int) -> complex:
    """S(k; m, n): Sigma on the critical channels, e^{2i delta_m} delta_{mn} elsewhere."""
    if m in CRITICAL_CHANNELS and n in CRITICAL_CHANNELS:
        return complex(sigma(flux, lam, k).entries[m + 1, n + 1])
    if m != n:
        return 0j
    return cmath.exp(2j * partial_wave_phase(flux, m))


def _smooth_kernel(flux: Flux, entries: np.ndarray, theta: float, theta0: float) -> complex:
    a = flux.alpha
    delta = theta - theta0
    value = math.sin(math.pi * a) * cmath.exp(-0.5j * delta) / math.sin(0.5 * delta)
    for m in CRITICAL_CHANNELS:
        for n in CRITICAL_CHANNELS:
            correction = entries[m + 1, n + 1]
            if m == n:
                correction -= cmath.exp(-(2 * m + 1) * 1j * math.pi * a)
            value += correction * cmath.exp(1j * (m * theta - n * theta0))
    return value / (2.0 * math.pi)


def kernel(
    flux: Flux,
    lam: LambdaParams,
    k: float,
    theta: float,
    theta0: float,
    cone: float = KERNEL_CONE,
) -> KernelSample:
    """Smooth part of the angular scattering kernel.

    Raises:
        ForwardDirection: when |sin((theta - theta0) / 2)| <= cone
    """
    k = _check_k(k)
    if abs(math.sin(0.5 * (theta - theta0))) <= cone:
        raise ForwardDirection(
            f"theta={theta!r} lies in the forward cone around theta0={theta0!r}"
        )
    entries = sigma(flux, lam, k).entries
    return KernelSample(
        k=k,
        theta=float(theta),
        theta0=float(theta0),
        value=complex(_smooth_kernel(flux, entries, theta, theta0)),
        delta_coefficient=math.cos(math.pi * flux.alpha),
    )


def kernel_grid(
    flux: Flux,
    lam: LambdaParams,
    k: float,
    thetas: np.ndarray,
    theta0: float,
    cone: float = KERNEL_CONE,
) -> list[KernelSample]:
    """Kernel samples over a theta grid, computing Sigma once."""
    k = _check_k(k)
    for theta in thetas:
        if abs(math.sin(0.5 * (theta - theta0))) <= cone:
            raise ForwardDirection(f"theta grid intersects the forward cone at {theta!r}")
    entries = sigma(flux, lam, k).entries
    weight = math.cos(math.pi * flux.alpha)
    return [
        KernelSample(
            k=k,
            theta=float(theta),
            theta0=float(theta0),
            value=complex(_smooth_kernel(flux, entries, float(theta), theta0)),
            delta_coefficient=weight,
        )
        for theta in thetas
    ]


def cross_section(flux: Flux, lam: LambdaParams, k: float, theta: float, theta0: float) -> float:
    """Differential cross section (2 pi / k) |S(k; theta, theta0)|^2."""
    return kernel(flux, lam, k, theta, theta0).dsigma_dtheta
