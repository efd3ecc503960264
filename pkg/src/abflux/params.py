"""
Parameter space of the point interaction: flux, the Lambda chart and the U chart.

The boundary condition Phi_1 = Lambda Phi_2 links the singular and the regular
small-r coefficients of the two critical channels (m = -1 and m = 0). On the open
dense slice handled here, Lambda is fixed by two real couplings u, v and one
complex coupling w. The unitary chart U(omega, a, b, q) covers every self-adjoint
extension; it maps into the Lambda chart wherever d = sin(omega) + q sin(a - pi alpha)
does not vanish.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from abflux.errors import ConfigError, DomainError, NotInvertible
from abflux.specialfn import gamma_real

logger = logging.getLogger(__name__)

FLUX_MARGIN = 1e-6
CHART_TOLERANCE = 1e-10
TWO_PI = 2.0 * math.pi


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


# =============================================================================
# Value types
# =============================================================================


@dataclass(frozen=True)
class Flux:
    """Fractional part alpha of the flux, kept inside [1e-6, 1 - 1e-6]."""

    alpha: float

    def __post_init__(self) -> None:
        alpha = _finite("alpha", self.alpha)
        if not (FLUX_MARGIN <= alpha <= 1.0 - FLUX_MARGIN):
            raise DomainError(
                f"alpha must lie in [{FLUX_MARGIN}, 1 - {FLUX_MARGIN}], got {alpha!r}"
            )
        object.__setattr__(self, "alpha", alpha)

    @property
    def orders(self) -> tuple[float, float]:
        """Diagonal of D: (1 - alpha) for the e^{-i theta} channel, alpha for the constant one."""
        return (1.0 - self.alpha, self.alpha)

    @property
    def d_matrix(self) -> np.ndarray:
        return np.diag(self.orders)

    @cached_property
    def gamma_ratios(self) -> tuple[float, float]:
        """(Gamma(alpha)/Gamma(2 - alpha), Gamma(1 - alpha)/Gamma(1 + alpha))."""
        a = self.alpha
        return (
            gamma_real(a) / gamma_real(2.0 - a),
            gamma_real(1.0 - a) / gamma_real(1.0 + a),
        )


@dataclass(frozen=True)
class LambdaParams:
    """Couplings of the Lambda chart: u, v real, w complex."""

    u: float = 0.0
    v: float = 0.0
    w: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", _finite("u", self.u))
        object.__setattr__(self, "v", _finite("v", self.v))
        w = complex(self.w)
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise DomainError(f"w must be finite, got {w!r}")
        object.__setattr__(self, "w", w)

    @property
    def w_abs2(self) -> float:
        return self.w.real * self.w.real + self.w.imag * self.w.imag

    def det(self, flux: Flux) -> float:
        """det Lambda = uv - alpha (1 - alpha) |w|^2."""
        a = flux.alpha
        return self.u * self.v - a * (1.0 - a) * self.w_abs2

    def is_pure(self) -> bool:
        """True for the regular (pure flux) boundary condition Lambda = 0."""
        return self.u == 0.0 and self.v == 0.0 and self.w == 0


@dataclass(frozen=True)
class UParams:
    """Unitary chart: angles omega, a, b in [0, 2 pi) and q in [0, 1]."""

    omega: float = math.pi
    a: float = 0.0
    b: float = 0.0
    q: float = 1.0

    def __post_init__(self) -> None:
        for name in ("omega", "a", "b"):
            angle = _finite(name, getattr(self, name)) % TWO_PI
            object.__setattr__(self, name, angle)
        q = _finite("q", self.q)
        if not (0.0 <= q <= 1.0):
            raise DomainError(f"q must lie in [0, 1], got {q!r}")
        object.__setattr__(self, "q", q)


# =============================================================================
# Matrices
# =============================================================================


def lambda_matrix(flux: Flux, lam: LambdaParams) -> np.ndarray:
    """Lambda = [[u, alpha conj(w)], [(1 - alpha) w, v]]; satisfies D Lambda = Lambda^* D."""
    a = flux.alpha
    return np.array(
        [[lam.u, a * lam.w.conjugate()], [(1.0 - a) * lam.w, lam.v]],
        dtype=complex,
    )


def unitary_matrix(up: UParams) -> np.ndarray:
    """U = e^{i omega} [[q e^{ia}, -s e^{-ib}], [s e^{ib}, q e^{-ia}]] with s = sqrt(1 - q^2)."""
    s = math.sqrt(max(0.0, 1.0 - up.q * up.q))
    phase = cmath.exp(1j * up.omega)
    return phase * np.array(
        [
            [up.q * cmath.exp(1j * up.a), -s * cmath.exp(-1j * up.b)],
            [s * cmath.exp(1j * up.b), up.q * cmath.exp(-1j * up.a)],
        ],
        dtype=complex,
    )


def d_invariant(flux: Flux, up: UParams) -> float:
    """d = sin(omega) + q sin(a - pi alpha); the U chart maps into Lambda iff d != 0."""
    return math.sin(up.omega) + up.q * math.sin(up.a - math.pi * flux.alpha)


def require_chart(flux: Flux, up: UParams) -> float:
    """Return d, raising NotInvertible when |d| <= 1e-10."""
    d = d_invariant(flux, up)
    if abs(d) <= CHART_TOLERANCE:
        raise NotInvertible(
            f"|d| = {abs(d):.3e} <= {CHART_TOLERANCE:g}: boundary condition has no Lambda form"
        )
    return d


def u_to_lambda(flux: Flux, up: UParams) -> LambdaParams:
    """Explicit U -> Lambda map.

    Raises:
        NotInvertible: when |d| <= 1e-10
    """
    d = require_chart(flux, up)
    a = flux.alpha
    h = 0.5 * math.pi * a
    u = (
        2.0 ** (2.0 - 2.0 * a)
        * gamma_real(2.0 - a)
        / gamma_real(a)
        * (math.cos(up.omega + h) + up.q * math.cos(up.a - h))
        / d
    )
    v = (
        -(2.0 ** (2.0 * a))
        * gamma_real(1.0 + a)
        / gamma_real(1.0 - a)
        * (math.sin(up.omega - h) + up.q * math.sin(up.a - h))
        / d
    )
    modulus = math.sqrt(max(0.0, 2.0 * (1.0 - up.q * up.q) * math.sin(math.pi * a)))
    w = modulus * cmath.exp(1j * (up.b - h - 0.25 * math.pi)) / d
    return LambdaParams(u=u, v=v, w=w)


def normalization_constants(flux: Flux) -> tuple[float, float]:
    """N_1 = 2^{-1/2} sin^{1/2}(pi alpha / 2), N_2 = 2^{-1/2} cos^{1/2}(pi alpha / 2)."""
    h = 0.5 * math.pi * flux.alpha
    return (math.sqrt(0.5 * math.sin(h)), math.sqrt(0.5 * math.cos(h)))


def boundary_value_matrices(flux: Flux) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boundary functionals on the deficiency basis.

    Returns the diagonal matrices (Phi_1, Phi_2+, Phi_2-), where Phi_1 is shared by
    both deficiency solutions and Phi_2+ / Phi_2- act on the +i and -i solutions.
    """
    nu = np.array(flux.orders)
    c = math.sqrt(0.5) / math.sin(math.pi * flux.alpha)
    amp = c * np.sqrt(np.cos(0.5 * math.pi * nu))
    rg_minus = np.array([1.0 / gamma_real(1.0 - n) for n in nu])
    rg_plus = np.array([1.0 / gamma_real(1.0 + n) for n in nu])
    phi1 = -1j * amp * 2.0**nu * rg_minus * np.exp(-0.25j * math.pi * nu)
    phi2_plus = 1j * amp * 2.0 ** (-nu) * rg_plus * np.exp(-0.75j * math.pi * nu)
    phi2_minus = 1j * amp * 2.0 ** (-nu) * rg_plus * np.exp(0.25j * math.pi * nu)
    return np.diag(phi1), np.diag(phi2_plus), np.diag(phi2_minus)


def lambda_from_unitary(flux: Flux, up: UParams) -> np.ndarray:
    """Lambda = (Phi_1 (1 + U)) (Phi_2+ + Phi_2- U)^{-1}, the matrix form of u_to_lambda."""
    require_chart(flux, up)
    u_mat = unitary_matrix(up)
    phi1, phi2_plus, phi2_minus = boundary_value_matrices(flux)
    top = phi1 @ (np.eye(2) + u_mat)
    bottom = phi2_plus + phi2_minus @ u_mat
    return np.linalg.solve(bottom.T, top.T).T


# =============================================================================
# JSON
# =============================================================================

LAMBDA_KEYS = ("u", "v", "w_re", "w_im")
UNITARY_KEYS = ("omega", "a", "b", "q")


def params_to_json(flux: Flux, params: LambdaParams | UParams) -> dict[str, float]:
    """Flat JSON object for either chart."""
    if isinstance(params, UParams):
        return {
            "alpha": flux.alpha,
            "omega": params.omega,
            "a": params.a,
            "b": params.b,
            "q": params.q,
        }
    return {
        "alpha": flux.alpha,
        "u": params.u,
        "v": params.v,
        "w_re": params.w.real,
        "w_im": params.w.imag,
    }


def _number(obj: dict[str, Any], key: str, default: float) -> float:
    raw = obj.get(key, default)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{key} must be a number, got {raw!r}")
    return float(raw)


def params_from_json(obj: dict[str, Any]) -> tuple[Flux, LambdaParams | UParams]:
    """Parse the flat JSON object; U-chart keys select the U chart.

    Raises:
        ConfigError: missing alpha, mixed charts or non-numeric fields
        DomainError: values outside the parameter domain
    """
    if not isinstance(obj, dict):
        raise ConfigError("Parameters must be a JSON object")
    if "alpha" not in obj:
        raise ConfigError("Missing required field 'alpha'")
    flux = Flux(_number(obj, "alpha", 0.0))
    has_lambda = any(key in obj for key in LAMBDA_KEYS)
    has_unitary = any(key in obj for key in UNITARY_KEYS)
    if has_lambda and has_unitary:
        raise ConfigError("Lambda-chart and U-chart fields cannot be mixed")
    if has_unitary:
        return flux, UParams(
            omega=_number(obj, "omega", math.pi),
            a=_number(obj, "a", 0.0),
            b=_number(obj, "b", 0.0),
            q=_number(obj, "q", 1.0),
        )
    return flux, LambdaParams(
        u=_number(obj, "u", 0.0),
        v=_number(obj, "v", 0.0),
        w=complex(_number(obj, "w_re", 0.0), _number(obj, "w_im", 0.0)),
    )


def resolve_lambda(flux: Flux, params: LambdaParams | UParams) -> LambdaParams:
    """Lambda-chart couplings for either chart."""
    if isinstance(params, UParams):
        lam = u_to_lambda(flux, params)
        logger.debug(f"U chart mapped to u={lam.u!r}, v={lam.v!r}, w={lam.w!r}")
        return lam
    return params
