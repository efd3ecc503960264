"""
Command-line front end.

Natural units throughout (hbar = 2m = 1): energies are E = k^2 for scattering and
E = -p^2 for bound states, lengths are inverse momenta.

Exit codes: 0 ok, 2 bad parameters, 3 boundary condition outside the Lambda
chart, 4 angle grid inside the forward cone.
"""

import argparse
import itertools
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from abflux import __version__
from abflux.config import Settings
from abflux.errors import (
    AbfluxError,
    ConfigError,
    DomainError,
    ForwardDirection,
    NotInvertible,
    RootFindingError,
)
from abflux.helpers import complex_pair, open_output, write_csv
from abflux.params import Flux, LambdaParams, UParams, params_to_json, resolve_lambda
from abflux.scattering import kernel_grid, sigma
from abflux.specialfn import bessel_j, bessel_k, gamma_real
from abflux.spectrum import eigenfunction_value, find_bound_states

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BAD_PARAMETERS = 2
EXIT_CHART_SINGULAR = 3
EXIT_FORWARD_CONE = 4

SPECIAL_FUNCTIONS: dict[str, Callable[[float, float], float]] = {
    "gamma": lambda nu, x: gamma_real(x),
    "bessel_j": bessel_j,
    "bessel_k": bessel_k,
}

SIGMA_HEADER = ["s11_re", "s11_im", "s12_re", "s12_im", "s21_re", "s21_im", "s22_re", "s22_im"]


@dataclass(frozen=True)
class Axis:
    """Evenly spaced grid: count points from start to stop (start only when count is 1)."""

    start: float
    stop: float
    count: int
    log: bool = False

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError(f"Grid counts must be at least 1, got {self.count}")
        if not self.start <= self.stop:
            raise ConfigError(f"Grid range must be ordered, got [{self.start}, {self.stop}]")
        if self.log and self.start <= 0.0:
            raise ConfigError("Logarithmic grids need a positive start")

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.start]
        if self.log:
            return np.geomspace(self.start, self.stop, self.count).tolist()
        return np.linspace(self.start, self.stop, self.count).tolist()


@dataclass(frozen=True)
class RunConfig:
    """Validated command line."""

    command: str
    fmt: str = "json"
    out: str | None = None
    flux: Flux | None = None
    params: LambdaParams | UParams | None = None
    k_values: tuple[float, ...] = ()
    theta0: float = 0.0
    thetas: tuple[float, ...] = ()
    eigenfunction: bool = False
    state_index: int = 0
    radii: tuple[float, ...] = ()
    sweep_axes: tuple[Axis, ...] = ()
    w_phase: float = 0.0
    function: str = ""
    nu: float = 0.0
    x: float = 0.0


# =============================================================================
# Parser
# =============================================================================


def _add_flux(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, required=True, help="fractional flux in (0, 1)")


def _add_couplings(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("boundary condition (Lambda chart or U chart)")
    group.add_argument("--u", type=float, help="coupling of the m=-1 channel")
    group.add_argument("--v", type=float, help="coupling of the m=0 channel")
    group.add_argument("--w-re", "--w", type=float, help="real part of the channel coupling w")
    group.add_argument("--w-im", type=float, help="imaginary part of the channel coupling w")
    group.add_argument("--omega", type=float, help="U chart: overall phase")
    group.add_argument("--a", type=float, help="U chart: diagonal phase")
    group.add_argument("--b", type=float, help="U chart: off-diagonal phase")
    group.add_argument("--q", type=float, help="U chart: diagonal modulus in [0, 1]")


def _add_output(parser: argparse.ArgumentParser, default_format: str) -> None:
    parser.add_argument("--format", choices=("json", "csv"), default=default_format)
    parser.add_argument("--out", help="output path (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abflux",
        description=(
            "Aharonov-Bohm flux with a point interaction. Natural units hbar = 2m = 1: "
            "scattering energy E = k^2, bound states E = -p^2."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", help="bound states")
    _add_flux(spectrum)
    _add_couplings(spectrum)
    _add_output(spectrum, "json")
    spectrum.add_argument("--eigenfunction", action="store_true", help="dump psi as r,theta,re,im")
    spectrum.add_argument("--state", type=int, default=0, help="index of the dumped state")
    spectrum.add_argument("--r-min", type=float, default=0.01)
    spectrum.add_argument("--r-max", type=float, default=10.0)
    spectrum.add_argument("--r-count", type=int, default=50)
    spectrum.add_argument("--theta-count", type=int, default=8)

    smatrix = sub.add_parser("smatrix", help="channel scattering matrix over a k grid")
    _add_flux(smatrix)
    _add_couplings(smatrix)
    _add_output(smatrix, "csv")
    smatrix.add_argument("--k", type=float, help="single momentum")
    smatrix.add_argument("--k-min", type=float, default=0.01)
    smatrix.add_argument("--k-max", type=float, default=100.0)
    smatrix.add_argument("--k-count", type=int, default=41)
    smatrix.add_argument("--k-spacing", choices=("log", "lin"), default="log")

    xsection = sub.add_parser("xsection", help="differential cross section over a theta grid")
    _add_flux(xsection)
    _add_couplings(xsection)
    _add_output(xsection, "csv")
    xsection.add_argument("--k", type=float, default=1.0)
    xsection.add_argument("--theta0", type=float, default=0.0, help="incidence angle")
    xsection.add_argument("--theta-count", type=int, default=360)
    xsection.add_argument("--theta-min", type=float, help="explicit grid start")
    xsection.add_argument("--theta-max", type=float, help="explicit grid end")

    sweep = sub.add_parser("sweep", help="bound states and Sigma over a (u, v, |w|) grid")
    _add_flux(sweep)
    _add_output(sweep, "csv")
    for name in ("u", "v"):
        sweep.add_argument(f"--{name}-min", type=float, default=0.0)
        sweep.add_argument(f"--{name}-max", type=float, default=0.0)
        sweep.add_argument(f"--{name}-count", type=int, default=1)
    sweep.add_argument("--w-abs-min", type=float, default=0.0)
    sweep.add_argument("--w-abs-max", type=float, default=0.0)
    sweep.add_argument("--w-abs-count", type=int, default=1)
    sweep.add_argument("--w-phase", type=float, default=0.0, help="phase of w on the whole grid")
    sweep.add_argument("--k", type=float, default=1.0, help="momentum for Sigma")

    specfun = sub.add_parser("specfun", help="evaluate a special function")
    specfun.add_argument("--function", choices=sorted(SPECIAL_FUNCTIONS), required=True)
    specfun.add_argument("--nu", type=float, default=0.0)
    specfun.add_argument("--x", type=float, required=True)

    sub.add_parser("serve", help="run the JSON API development server on PORT")
    return parser


def _couplings(args: argparse.Namespace) -> LambdaParams | UParams:
    lam_given = [args.u, args.v, args.w_re, args.w_im]
    unit_given = [args.omega, args.a, args.b, args.q]
    if any(x is not None for x in unit_given):
        if any(x is not None for x in lam_given):
            raise ConfigError("Lambda-chart and U-chart options cannot be mixed")
        return UParams(
            omega=math.pi if args.omega is None else args.omega,
            a=args.a or 0.0,
            b=args.b or 0.0,
            q=1.0 if args.q is None else args.q,
        )
    return LambdaParams(
        u=args.u or 0.0, v=args.v or 0.0, w=complex(args.w_re or 0.0, args.w_im or 0.0)
    )


def _theta_grid(args: argparse.Namespace) -> tuple[float, ...]:
    count = args.theta_count
    if count < 1:
        raise ConfigError("--theta-count must be at least 1")
    if args.theta_min is None and args.theta_max is None:
        step = 2.0 * math.pi / count
        return tuple(args.theta0 + (j + 0.5) * step for j in range(count))
    if args.theta_min is None or args.theta_max is None:
        raise ConfigError("--theta-min and --theta-max must be given together")
    return tuple(Axis(args.theta_min, args.theta_max, count).values())


def _positive(name: str, value: float) -> float:
    if not (value > 0.0) or not math.isfinite(value):
        raise ConfigError(f"{name} must be positive, got {value!r}")
    return value


def build_config(args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into a RunConfig, enforcing every parameter rule."""
    command = args.command
    if command == "serve":
        return RunConfig(command=command)
    if command == "specfun":
        return RunConfig(command=command, function=args.function, nu=args.nu, x=args.x)

    flux = Flux(args.alpha)
    common = {"command": command, "fmt": args.format, "out": args.out, "flux": flux}
    if command == "sweep":
        axes = (
            Axis(args.u_min, args.u_max, args.u_count),
            Axis(args.v_min, args.v_max, args.v_count),
            Axis(args.w_abs_min, args.w_abs_max, args.w_abs_count),
        )
        if args.w_abs_min < 0.0:
            raise ConfigError("--w-abs-min must be non-negative")
        return RunConfig(
            **common,
            sweep_axes=axes,
            w_phase=args.w_phase,
            k_values=(_positive("--k", args.k),),
        )

    params = _couplings(args)
    if command == "spectrum":
        radii = Axis(_positive("--r-min", args.r_min), args.r_max, args.r_count, log=True)
        if args.theta_count < 1:
            raise ConfigError("--theta-count must be at least 1")
        thetas = tuple(2.0 * math.pi * j / args.theta_count for j in range(args.theta_count))
        return RunConfig(
            **common,
            params=params,
            eigenfunction=args.eigenfunction,
            state_index=args.state,
            radii=tuple(radii.values()),
            thetas=thetas,
        )
    if command == "smatrix":
        if args.k is not None:
            k_values = (_positive("--k", args.k),)
        else:
            _positive("--k-min", args.k_min)
            axis = Axis(args.k_min, args.k_max, args.k_count, log=args.k_spacing == "log")
            k_values = tuple(axis.values())
        return RunConfig(**common, params=params, k_values=k_values)
    if command == "xsection":
        return RunConfig(
            **common,
            params=params,
            k_values=(_positive("--k", args.k),),
            theta0=args.theta0,
            thetas=_theta_grid(args),
        )
    raise ConfigError(f"Unknown command {command!r}")


# =============================================================================
# Commands
# =============================================================================


def _emit_json(config: RunConfig, payload: Any) -> None:
    with open_output(config.out) as stream:
        stream.write(json.dumps(payload, indent=2) + "\n")


def _sigma_fields(entries: np.ndarray) -> list[float]:
    return [part for z in entries.reshape(-1).tolist() for part in complex_pair(z)]


def cmd_spectrum(config: RunConfig, settings: Settings) -> int:
    flux = config.flux
    lam = resolve_lambda(flux, config.params)
    report = find_bound_states(flux, lam)

    if not config.eigenfunction:
        if config.fmt == "json":
            _emit_json(config, {"parameters": params_to_json(flux, lam), **report.to_dict()})
            return EXIT_OK
        state_rows = [
            [s.p, s.energy, s.multiplicity, *complex_pair(s.xi), *complex_pair(s.eta)]
            for s in report.states
        ]
        header = ["p", "energy", "multiplicity", "xi_re", "xi_im", "eta_re", "eta_im"]
        with open_output(config.out) as stream:
            write_csv(state_rows, header, stream, comments=[f"count={report.count}"])
        return EXIT_OK

    if not report.states:
        comments = ["no bound states"]
        rows: list[list[float]] = []
    else:
        if not 0 <= config.state_index < len(report.states):
            raise ConfigError(
                f"--state must lie in [0, {len(report.states) - 1}], got {config.state_index}"
            )
        state = report.states[config.state_index]
        comments = [f"p={state.p!r}", f"energy={state.energy!r}"]
        rows = []
        for r in config.radii:
            for theta in config.thetas:
                value = eigenfunction_value(flux, state, r, theta)
                rows.append([r, theta, value.real, value.imag])
    with open_output(config.out) as stream:
        write_csv(rows, ["r", "theta", "re", "im"], stream, comments=comments)
    return EXIT_OK


def cmd_smatrix(config: RunConfig, settings: Settings) -> int:
    flux = config.flux
    lam = resolve_lambda(flux, config.params)
    matrices = [sigma(flux, lam, k) for k in config.k_values]
    if config.fmt == "json":
        rows = [{**m.to_dict(), "unitarity_deficit": m.unitarity_deficit} for m in matrices]
        _emit_json(config, {"parameters": params_to_json(flux, lam), "rows": rows})
        return EXIT_OK
    with open_output(config.out) as stream:
        write_csv(
            ([m.k, *_sigma_fields(m.entries), m.unitarity_deficit] for m in matrices),
            ["k", *SIGMA_HEADER, "unitarity_deficit"],
            stream,
            comments=[f"alpha={flux.alpha!r}"],
        )
    return EXIT_OK


def _angle_gap(theta: float, theta0: float) -> float:
    """Distance between two angles on the circle."""
    gap = math.fmod(theta - theta0, 2.0 * math.pi)
    return min(abs(gap), 2.0 * math.pi - abs(gap))


def cmd_xsection(config: RunConfig, settings: Settings) -> int:
    flux = config.flux
    lam = resolve_lambda(flux, config.params)
    for theta in config.thetas:
        if _angle_gap(theta, config.theta0) <= settings.forward_cone:
            raise ForwardDirection(
                f"theta={theta!r} is within {settings.forward_cone:g} of theta0={config.theta0!r}"
            )
    samples = kernel_grid(flux, lam, config.k_values[0], np.array(config.thetas), config.theta0)
    weight = math.cos(math.pi * flux.alpha)
    if config.fmt == "json":
        _emit_json(
            config,
            {
                "parameters": params_to_json(flux, lam),
                "delta_coefficient": weight,
                "samples": [sample.to_dict() for sample in samples],
            },
        )
        return EXIT_OK
    with open_output(config.out) as stream:
        write_csv(
            ([s.theta, s.dsigma_dtheta, s.value.real, s.value.imag] for s in samples),
            ["theta", "dsigma_dtheta", "re_S", "im_S"],
            stream,
            comments=[
                f"k={config.k_values[0]!r} theta0={config.theta0!r}",
                f"delta_coefficient=cos(pi alpha)={weight!r}",
            ],
        )
    return EXIT_OK


def _sweep_point(flux: Flux, k: float, w_phase: float, point: tuple[float, float, float]) -> list:
    u, v, w_abs = point
    lam = LambdaParams(u=u, v=v, w=w_abs * complex(math.cos(w_phase), math.sin(w_phase)))
    try:
        report = find_bound_states(flux, lam)
        count: int | None = report.count
        momenta = [s.p for s in report.states for _ in range(s.multiplicity)]
    except RootFindingError as e:
        logger.error(f"Sweep point u={u!r}, v={v!r}, |w|={w_abs!r}: {e}")
        count, momenta = None, []
    momenta += [None] * (2 - len(momenta))
    return [u, v, w_abs, count, *momenta, *_sigma_fields(sigma(flux, lam, k).entries)]


def cmd_sweep(config: RunConfig, settings: Settings) -> int:
    flux = config.flux
    total = math.prod(axis.count for axis in config.sweep_axes)
    if total > settings.max_sweep_points:
        raise ConfigError(f"Sweep has {total} points, limit is {settings.max_sweep_points}")

    grid = list(itertools.product(*(axis.values() for axis in config.sweep_axes)))
    k = config.k_values[0]
    with ThreadPoolExecutor(max_workers=settings.workers) as executor:
        rows = list(executor.map(lambda p: _sweep_point(flux, k, config.w_phase, p), grid))
    logger.info(f"Sweep finished: {total} points at alpha={flux.alpha:g}")

    header = ["u", "v", "w_abs", "count", "p1", "p2", *SIGMA_HEADER]
    if config.fmt == "json":
        records = [dict(zip(header, row, strict=True)) for row in rows]
        _emit_json(config, {"alpha": flux.alpha, "k": k, "rows": records})
        return EXIT_OK
    with open_output(config.out) as stream:
        write_csv(
            rows,
            header,
            stream,
            comments=[f"alpha={flux.alpha!r} k={k!r} w_phase={config.w_phase!r}"],
        )
    return EXIT_OK


def cmd_specfun(config: RunConfig, settings: Settings) -> int:
    value = SPECIAL_FUNCTIONS[config.function](config.nu, config.x)
    payload = {"function": config.function, "nu": config.nu, "x": config.x, "value": value}
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_serve(config: RunConfig, settings: Settings) -> int:
    from abflux.app import create_app

    app = create_app()
    app.run(host="0.0.0.0", port=settings.port, debug=settings.debug)
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig, Settings], int]] = {
    "spectrum": cmd_spectrum,
    "smatrix": cmd_smatrix,
    "xsection": cmd_xsection,
    "sweep": cmd_sweep,
    "specfun": cmd_specfun,
    "serve": cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code."""
    try:
        settings = Settings.from_env()
    except ConfigError as e:
        print(f"abflux: {e}", file=sys.stderr)
        return EXIT_BAD_PARAMETERS

    logging.basicConfig(
        level=settings.log_level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = build_config(args)
        return COMMANDS[config.command](config, settings)
    except NotInvertible as e:
        logger.error(str(e))
        return EXIT_CHART_SINGULAR
    except ForwardDirection as e:
        logger.error(str(e))
        return EXIT_FORWARD_CONE
    except (DomainError, ConfigError) as e:
        logger.error(str(e))
        return EXIT_BAD_PARAMETERS
    except AbfluxError as e:
        logger.error(f"Numerical failure: {e}")
        return 1
