"""
Flask application factory and JSON routes for abflux.
"""

import logging
import math
from typing import Any

from flask import Flask, request

from abflux import __version__
from abflux.config import Settings
from abflux.errors import AbfluxError, ConfigError, DomainError, ForwardDirection, NotInvertible
from abflux.helpers import json_error, json_success
from abflux.params import LambdaParams, params_from_json, params_to_json, resolve_lambda
from abflux.scattering import KERNEL_CONE, kernel, sigma
from abflux.spectrum import count_bound_states, find_bound_states

logger = logging.getLogger(__name__)


def create_app(config=None):
    """Application factory for creating Flask app instances."""
    app = Flask(__name__)

    settings = Settings.from_env()
    # no-op when the host process has already configured logging
    logging.basicConfig(level=settings.log_level)
    app.config["ABFLUX_SETTINGS"] = settings
    app.config["KERNEL_CONE"] = KERNEL_CONE
    app.config["JSON_SORT_KEYS"] = False

    # Apply any additional configuration
    if config:
        app.config.update(config)

    register_routes(app)
    register_error_handlers(app)

    return app


def register_error_handlers(app):
    """Translate library errors into JSON error responses."""

    @app.errorhandler(NotInvertible)
    def handle_chart_singular(error):
        logger.warning(f"Chart singular: {error}")
        return json_error(str(error), 422)

    @app.errorhandler(ForwardDirection)
    def handle_forward_direction(error):
        logger.warning(f"Forward direction requested: {error}")
        return json_error(str(error), 422)

    @app.errorhandler(DomainError)
    @app.errorhandler(ConfigError)
    def handle_bad_parameters(error):
        logger.warning(f"Bad parameters: {error}")
        return json_error(str(error), 400)

    @app.errorhandler(AbfluxError)
    def handle_numerical_failure(error):
        logger.error(f"Numerical failure: {error}")
        return json_error(str(error), 422)


def _body() -> dict[str, Any]:
    body = request.get_json(silent=True)
    if not isinstance(body, dict):
        raise ConfigError("Request body must be a JSON object")
    return body


def _number(body: dict[str, Any], key: str, default: float | None = None) -> float:
    raw = body.get(key, default)
    if raw is None:
        raise ConfigError(f"Missing required field {key!r}")
    if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not math.isfinite(raw):
        raise ConfigError(f"{key} must be a finite number, got {raw!r}")
    return float(raw)


def register_routes(app):
    """Register all application routes."""

    @app.route("/api/health")
    def health():
        return json_success("ok", version=__version__)

    @app.route("/api/spectrum", methods=["POST"])
    def spectrum():
        flux, params = params_from_json(_body())
        lam = resolve_lambda(flux, params)
        report = find_bound_states(flux, lam)
        return json_success(
            "spectrum computed",
            parameters=params_to_json(flux, lam),
            **report.to_dict(),
        )

    @app.route("/api/smatrix", methods=["POST"])
    def smatrix():
        body = _body()
        k = _number(body, "k")
        flux, params = params_from_json({key: v for key, v in body.items() if key != "k"})
        matrix = sigma(flux, resolve_lambda(flux, params), k)
        return json_success(
            "scattering matrix computed",
            unitarity_deficit=matrix.unitarity_deficit,
            **matrix.to_dict(),
        )

    @app.route("/api/kernel", methods=["POST"])
    def scattering_kernel():
        body = _body()
        k = _number(body, "k")
        theta = _number(body, "theta")
        theta0 = _number(body, "theta0", 0.0)
        flux, params = params_from_json(
            {key: v for key, v in body.items() if key not in ("k", "theta", "theta0")}
        )
        sample = kernel(
            flux, resolve_lambda(flux, params), k, theta, theta0, cone=app.config["KERNEL_CONE"]
        )
        return json_success("kernel computed", **sample.to_dict())

    @app.route("/api/bound-states/count", methods=["POST"])
    def bound_state_count():
        flux, params = params_from_json(_body())
        if not isinstance(params, LambdaParams):
            raise ConfigError("Bound-state counting takes Lambda-chart parameters")
        return json_success("bound states counted", count=count_bound_states(params, flux))
