"""
abflux - Aharonov-Bohm flux with a point interaction

Bound states, channel scattering matrix, angular scattering kernel and cross
section for the five-parameter family of self-adjoint extensions.
"""

__version__ = "1.0.0"
__author__ = "abflux developers"

from abflux.params import Flux, LambdaParams, UParams, u_to_lambda
from abflux.scattering import cross_section, kernel, sigma
from abflux.spectrum import count_bound_states, find_bound_states

__all__ = [
    "Flux",
    "LambdaParams",
    "UParams",
    "__version__",
    "count_bound_states",
    "cross_section",
    "find_bound_states",
    "kernel",
    "sigma",
    "u_to_lambda",
]
