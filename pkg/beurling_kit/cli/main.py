#!/usr/bin/env python3
"""
beurling-kit command line
Each subcommand either runs the matching checks of a scenario file or builds
a one-check scenario from its flags
"""

import argparse
import asyncio
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import structlog

from config.environments.env_loader import EnvironmentLoader

from ..errors import ConfigError
from .runner import EXIT_CONFIG, ScenarioRunner
from .scenario import Scenario, load_scenario, validate_scenario

logger = structlog.get_logger(__name__)

SUBCOMMAND_CHECKS: Dict[str, tuple] = {
    "verify": ("theorem3", "theorem3_suite", "theorem2_ball"),
    "cover": ("cover", "gauge_axioms"),
    "density": ("density",),
    "extremal": ("extremal", "extremal_sweep"),
    "counterexample": ("counterexample", "classify_net"),
    "lemma1": ("lemma1", "lemma1_suite"),
    "rouche": ("rouche", "rouche_suite"),
    "constants": ("constants",),
    "demo-landau": ("landau_demo",),
}


def configure_logging(level: str = "INFO", fmt: str = "json") -> None:
    """structlog through stdlib logging on stderr; stdout carries the run summary"""
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level.upper(), logging.INFO),
                        format="%(message)s", force=True)
    renderer = structlog.dev.ConsoleRenderer() if fmt == "console" else structlog.processors.JSONRenderer()
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )


def _json_arg(flag: str):
    def parse(text: str) -> Any:
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise argparse.ArgumentTypeError(f"{flag} expects JSON: {e.msg} (column {e.colno})")
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Scenario file (TOML, or JSON)")
    common.add_argument("--seed", type=int, help="Master seed (non-negative)")
    common.add_argument("--out", help="Output directory for reports")
    common.add_argument("--jobs", type=int, help="Worker threads for independent checks")
    common.add_argument("--cap-points", type=int, dest="cap_points", help="Point materialization cap")
    common.add_argument("--env-file", dest="env_file", help="Environment file (default: .env)")
    common.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING, ERROR")
    common.add_argument("--log-format", dest="log_format", choices=["json", "console"])

    parser = argparse.ArgumentParser(prog="beurling-kit",
                                     description="Numerical verification of multidimensional sampling inequalities")
    sub = parser.add_subparsers(dest="command", required=True)

    body = _json_arg("--body")
    sample_set = _json_arg("--set")
    window = _json_arg("--window")

    verify = sub.add_parser("verify", parents=[common], help="Sampling inequality suite or single instance")
    verify.add_argument("--count", type=int, default=500)
    verify.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    verify.add_argument("--bodies", nargs="+", default=["ball", "box", "polytope"])
    verify.add_argument("--max-terms", type=int, dest="max_terms", default=10)
    verify.add_argument("--body", type=body)
    verify.add_argument("--set", type=sample_set)
    verify.add_argument("--function", type=_json_arg("--function"))
    verify.add_argument("--window", type=window)
    verify.add_argument("--grid-step", type=float, dest="grid_step")
    verify.add_argument("--probe-step", type=float, dest="probe_step")
    verify.add_argument("--ball-form", action="store_true", dest="ball_form",
                        help="Check the Euclidean-ball form instead of the gauge form")

    cover = sub.add_parser("cover", parents=[common], help="Covering radius of a sampling set")
    cover.add_argument("--body", type=body)
    cover.add_argument("--set", type=sample_set)
    cover.add_argument("--window", type=window)
    cover.add_argument("--probe-step", type=float, nargs="+", dest="probe_steps", default=[0.01])
    cover.add_argument("--expected", type=float)
    cover.add_argument("--axioms", action="store_true", help="Also check the gauge norm axioms")

    density = sub.add_parser("density", parents=[common], help="Lower uniform density estimate")
    density.add_argument("--set", type=sample_set)
    density.add_argument("--radii", type=float, nargs="+", default=[10.0, 20.0, 40.0])
    density.add_argument("--center-samples", type=int, dest="center_samples", default=256)
    density.add_argument("--window", type=window)
    density.add_argument("--sigma", type=float)
    density.add_argument("--expected", type=float)

    extremal = sub.add_parser("extremal", parents=[common], help="Adversarial ratio lower bound")
    extremal.add_argument("--sigma", type=float, default=1.0)
    extremal.add_argument("--spacing", type=float)
    extremal.add_argument("--spacings", type=float, nargs="+")
    extremal.add_argument("--window-length", type=float, dest="window_length", default=60.0)
    extremal.add_argument("--x-star", type=float, dest="x_star")

    counter = sub.add_parser("counterexample", parents=[common], help="Sharpness construction")
    counter.add_argument("--body", type=body)
    counter.add_argument("--net-body", type=_json_arg("--net-body"), dest="net_body")
    counter.add_argument("--direction", type=float, nargs="+")
    counter.add_argument("--window", type=window)
    counter.add_argument("--sheet-step", type=float, dest="sheet_step")
    counter.add_argument("--probes", type=int, default=10_000)

    lemma = sub.add_parser("lemma1", parents=[common], help="Cosine lower bound on (-pi/2, pi/2)")
    lemma.add_argument("--count", type=int, default=1000)
    lemma.add_argument("--amplitudes", type=float, nargs="+")
    lemma.add_argument("--omegas", type=float, nargs="+")
    lemma.add_argument("--tau", type=float, default=1.0)
    lemma.add_argument("--max-terms", type=int, dest="max_terms", default=8)
    lemma.add_argument("--extended", action="store_true")

    rouche = sub.add_parser("rouche", parents=[common], help="Sign-change and contour mechanics")
    rouche.add_argument("--count", type=int, default=20)
    rouche.add_argument("--eps", type=float, default=0.1)
    rouche.add_argument("--N", type=int, dest="N", default=10)

    constants = sub.add_parser("constants", parents=[common], help="Compare 1/cos(rho) with 1/(1-sin(rho))")
    constants.add_argument("--rhos", type=float, nargs="+")

    landau = sub.add_parser("demo-landau", parents=[common], help="Ratio growth with the window size")
    landau.add_argument("--sigma", type=float, default=1.0)
    landau.add_argument("--a", type=float, default=3.1)
    landau.add_argument("--half-widths", type=float, nargs="+", dest="half_widths")

    sub.add_parser("run", parents=[common], help="Run every check of a scenario file")
    return parser


def _drop_none(values: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in values.items() if v is not None}


def check_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Translate subcommand flags into one scenario check entry"""
    command = args.command
    if command == "verify":
        if args.body is not None or args.set is not None or args.function is not None:
            kind = "theorem2_ball" if args.ball_form else "theorem3"
            return _drop_none({"kind": kind, "body": args.body, "set": args.set, "function": args.function,
                               "window": args.window, "grid_step": args.grid_step,
                               "probe_step": args.probe_step})
        return {"kind": "theorem3_suite", "count": args.count, "dims": args.dims, "bodies": args.bodies,
                "max_terms": args.max_terms}
    if command == "cover":
        if args.axioms and args.set is None:
            return _drop_none({"kind": "gauge_axioms", "body": args.body})
        return _drop_none({"kind": "cover", "body": args.body, "set": args.set, "window": args.window,
                           "probe_steps": args.probe_steps, "expected": args.expected})
    if command == "density":
        return _drop_none({"kind": "density", "set": args.set, "radii": args.radii,
                           "center_samples": args.center_samples, "window": args.window,
                           "sigma": args.sigma, "expected": args.expected})
    if command == "extremal":
        if args.spacings:
            return {"kind": "extremal_sweep", "sigma": args.sigma, "spacings": args.spacings,
                    "window_length": args.window_length}
        return _drop_none({"kind": "extremal", "sigma": args.sigma, "spacing": args.spacing,
                           "window_length": args.window_length, "x_star": args.x_star})
    if command == "counterexample":
        options = {"body": args.body, "window": args.window, "sheet_step": args.sheet_step, "probes": args.probes}
        if args.net_body is not None:
            return _drop_none({"kind": "classify_net", "net_body": args.net_body, **options})
        return _drop_none({"kind": "counterexample", "direction": args.direction, **options})
    if command == "lemma1":
        if args.amplitudes is not None or args.omegas is not None:
            return _drop_none({"kind": "lemma1", "amplitudes": args.amplitudes, "omegas": args.omegas,
                               "tau": args.tau, "extended": args.extended})
        return {"kind": "lemma1_suite", "count": args.count, "tau": args.tau, "max_terms": args.max_terms,
                "extended": args.extended}
    if command == "rouche":
        return {"kind": "rouche_suite", "count": args.count, "eps": args.eps, "N": args.N}
    if command == "constants":
        return _drop_none({"kind": "constants", "rhos": args.rhos})
    if command == "demo-landau":
        return _drop_none({"kind": "landau_demo", "sigma": args.sigma, "a": args.a,
                           "half_widths": args.half_widths})
    raise ConfigError(f"Subcommand {command} needs --config")


def scenario_from_args(args: argparse.Namespace) -> Scenario:
    """Load --config (keeping the checks this subcommand owns) or build from flags"""
    if args.seed is not None and args.seed < 0:
        raise ConfigError("Seed must be non-negative", field="--seed")
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError("Jobs must be at least 1", field="--jobs")
    if args.cap_points is not None and args.cap_points < 1:
        raise ConfigError("Point cap must be at least 1", field="--cap-points")

    if args.config:
        scenario = load_scenario(args.config)
        owned = SUBCOMMAND_CHECKS.get(args.command)
        if owned is None:
            return scenario
        checks = [check for check in scenario.checks if check.kind in owned]
        if not checks:
            raise ConfigError(f"Scenario {scenario.name} has no {args.command} checks", field="checks")
        return scenario.model_copy(update={"checks": checks})

    if args.command == "run":
        raise ConfigError("The run subcommand needs --config", field="--config")
    return validate_scenario({"name": args.command.replace("-", "_"), "checks": [check_from_args(args)]})


def _print_summary(scenario: Scenario, result) -> None:
    passed = sum(r.status == "passed" for r in result.reports)
    info = sum(r.status == "info" for r in result.reports)
    print(f"{scenario.name}: {len(result.reports)} reports, {passed} passed, {info} info, "
          f"{result.skipped} skipped, {result.failures} failed -> {result.out_dir}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or "INFO", args.log_format or "json")

    try:
        config = EnvironmentLoader(args.env_file).load()
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    configure_logging(args.log_level or config["logging"]["level"],
                      args.log_format or config["logging"]["format"])

    try:
        scenario = scenario_from_args(args)
    except ConfigError as e:
        logger.error("Invalid scenario", error=str(e), field=e.field, line=e.line, column=e.column)
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    runner = ScenarioRunner(config, seed=args.seed, jobs=args.jobs, cap_points=args.cap_points,
                            out_dir=args.out)
    result = asyncio.run(runner.run(scenario))
    _print_summary(scenario, result)
    return result.exit_code


def entrypoint(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    entrypoint()
