"""
Check Orchestrator
Routes named checks with their parameters to the verification handlers
"""

import asyncio
from concurrent.futures import Executor
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import structlog

from ..errors import BeurlingKitError, HypothesisViolationError
from ..services.bandlimited import BandlimitedFunction, real_trigonometric
from ..services.convex_geometry import body_from_dict, body_to_dict, gauge_norm_axioms_check
from ..services.sampling_sets import (
    covering_radius,
    lower_uniform_density,
    nyquist_check_1d,
    set_from_dict,
    set_to_dict,
)
from ..services.windows import DEFAULT_POINT_CAP, Window, default_window
from .counterexample import build_proposition1, classify_net_body
from .extremal import MAX_FREQUENCIES, MAX_POINTS, extremal_report, extremal_sweep, landau_necessity_demo
from .lemma_checks import (
    CosineFamily,
    check_lemma1,
    check_rouche_mechanics,
    random_cosine_family,
    random_rouche_function,
)
from .reports import VerificationReport
from .theorem_checks import check_theorem2_ball, check_theorem3, constants_sweep, random_theorem3_instance

logger = structlog.get_logger(__name__)

Handler = Callable[[Dict[str, Any]], List[VerificationReport]]

DENSITY_TOLERANCE = 0.02
COVERING_TOLERANCE = 1e-12
AXIOM_TOLERANCE = 1e-9


def _window(params: Dict[str, Any], dim: int) -> Window:
    bounds = params.get("window")
    window = Window.from_list(bounds) if bounds is not None else default_window(dim)
    window.check_dim(dim)
    return window


def _rng(params: Dict[str, Any], *stream: int) -> np.random.Generator:
    return np.random.default_rng([int(params.get("seed", 42)), *stream])


class CheckOrchestrator:
    """Dispatches checks by name and turns handler exceptions into report statuses"""

    def __init__(self, config: Optional[Dict[str, Any]] = None, executor: Optional[Executor] = None):
        self.config = config or {}
        limits = self.config.get("limits", {})
        self.cap = int(limits.get("point_cap", DEFAULT_POINT_CAP))
        self.lp_limits = {"max_frequencies": int(limits.get("lp_max_frequencies", MAX_FREQUENCIES)),
                          "max_points": int(limits.get("lp_max_points", MAX_POINTS))}
        self.tolerance = float(self.config.get("defaults", {}).get("tolerance", AXIOM_TOLERANCE))
        self.executor = executor
        self.check_handlers: Dict[str, Handler] = {}
        self._register_default_handlers()
        logger.info("CheckOrchestrator initialized", checks=sorted(self.check_handlers), cap=self.cap)

    def _register_default_handlers(self) -> None:
        # Inequality checks
        self.check_handlers.update({
            "theorem3": self._handle_theorem3,
            "theorem3_suite": self._handle_theorem3_suite,
            "theorem2_ball": self._handle_theorem2_ball,
            "constants": self._handle_constants,
        })

        # Geometry and sets
        self.check_handlers.update({
            "gauge_axioms": self._handle_gauge_axioms,
            "cover": self._handle_cover,
            "density": self._handle_density,
        })

        # Extremal and sharpness
        self.check_handlers.update({
            "extremal": self._handle_extremal,
            "extremal_sweep": self._handle_extremal_sweep,
            "landau_demo": self._handle_landau_demo,
            "counterexample": self._handle_counterexample,
            "classify_net": self._handle_classify_net,
        })

        # One-dimensional mechanics
        self.check_handlers.update({
            "lemma1": self._handle_lemma1,
            "lemma1_suite": self._handle_lemma1_suite,
            "rouche": self._handle_rouche,
            "rouche_suite": self._handle_rouche_suite,
        })

    def register_handler(self, check: str, handler: Handler) -> None:
        self.check_handlers[check] = handler
        logger.info("Registered check handler", check=check)

    def run_check(self, check: str, params: Dict[str, Any]) -> List[VerificationReport]:
        """Run one check synchronously; every exception becomes a report"""
        handler = self.check_handlers.get(check)
        if handler is None:
            logger.warning("No handler found for check", check=check)
            return [VerificationReport.errored(check, params, f"No handler for check: {check}")]
        try:
            logger.info("Running check", check=check)
            reports = handler(params)
            logger.info("Check finished", check=check, reports=len(reports),
                        failed=sum(r.counts_as_failure for r in reports))
            return reports
        except HypothesisViolationError as e:
            logger.info("Check skipped", check=check, reason=str(e))
            return [VerificationReport.skipped(check, params, str(e))]
        except BeurlingKitError as e:
            logger.error("Check failed with error", check=check, error=str(e))
            return [VerificationReport.errored(check, params, str(e))]
        except Exception as e:
            logger.error("Check raised unexpectedly", check=check, error=str(e), error_type=type(e).__name__)
            return [VerificationReport.errored(check, params, f"{type(e).__name__}: {e}")]

    async def process_check(self, check: str, params: Dict[str, Any]) -> List[VerificationReport]:
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(self.executor, self.run_check, check, params)

    # Inequality handlers
    def _instance_check(self, params: Dict[str, Any], check) -> List[VerificationReport]:
        body = body_from_dict(params["body"])
        L = set_from_dict(params["set"])
        f = BandlimitedFunction.from_dict(params["function"])
        window = _window(params, body.dim)
        return [check(f, L, body, window, float(params.get("grid_step", 0.05)),
                      params.get("probe_step"), cap=self.cap, seed=params.get("seed"))]

    def _handle_theorem3(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """One 1/cos rho inequality check on the given body, set and function"""
        return self._instance_check(params, check_theorem3)

    def _handle_theorem2_ball(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Euclidean-ball form with the 1/(1 - sin rho) constant"""
        return self._instance_check(params, check_theorem2_ball)

    def _handle_theorem3_suite(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Randomized period-aligned instances cycling through dims and body kinds"""
        dims = list(params.get("dims", [1, 2, 3]))
        kinds = list(params.get("bodies", ["ball", "box", "polytope"]))
        seed = int(params.get("seed", 42))
        reports = []
        for i in range(int(params.get("count", 500))):
            rng = _rng(params, i)
            dim = dims[i % len(dims)]
            kind = kinds[(i // len(dims)) % len(kinds)]
            instance = random_theorem3_instance(rng, dim, kind, int(params.get("max_terms", 10)))
            try:
                report = check_theorem3(instance.f, instance.L, instance.body, instance.window,
                                        instance.grid_step, instance.probe_step, cap=self.cap, seed=seed)
                report.inputs["instance"] = i
            except HypothesisViolationError as e:
                report = VerificationReport.skipped("theorem3", {"seed": seed, "instance": i}, str(e))
            reports.append(report)
        return reports

    def _handle_constants(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Both constants at each rho; defaults to 0, 0.01, ..., 1.56"""
        return constants_sweep(params.get("rhos"))

    # Geometry handlers
    def _handle_gauge_axioms(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Norm axioms of the polar gauge on seeded normal pairs"""
        body = body_from_dict(params["body"])
        rng = _rng(params)
        count = int(params.get("pairs", 1000))
        X = rng.normal(size=(count, body.dim))
        Y = rng.normal(size=(count, body.dim))
        report = gauge_norm_axioms_check(body, zip(X, Y), float(params.get("tolerance", self.tolerance)))
        report.inputs["seed"] = int(params.get("seed", 42))
        return [report]

    def _handle_cover(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Covering radius per probe step, compared with ``expected`` when given"""
        body = body_from_dict(params["body"])
        L = set_from_dict(params["set"])
        window = _window(params, body.dim)
        steps = params.get("probe_steps") or [float(params.get("probe_step", 0.01))]
        expected = params.get("expected")
        reports = []
        for step in steps:
            estimate = covering_radius(L, body, window, float(step), self.cap)
            inputs = {"body": body_to_dict(body), "set": set_to_dict(L), "window": window.to_list(),
                      "probe_step": float(step)}
            measured = {"rho_estimate": estimate.rho_estimate, "rho_cert": estimate.rho_upper_certificate,
                        "probes": estimate.probes, "points": estimate.points}
            if expected is None:
                reports.append(VerificationReport.informational("cover", inputs, measured))
                continue
            expected = float(expected)
            reports.append(VerificationReport.build(
                "cover", inputs, measured, bound={"expected": expected},
                margin=min(expected - estimate.rho_estimate, estimate.rho_upper_certificate - expected),
                error_budget=COVERING_TOLERANCE))
        return reports

    def _handle_density(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Lower uniform density over increasing radii, with the 1D Nyquist verdict if sigma is set"""
        L = set_from_dict(params["set"])
        window = _window(params, L.dim) if params.get("window") is not None else None
        estimates = lower_uniform_density(L, params["radii"], int(params.get("center_samples", 256)),
                                          int(params.get("seed", 42)), window, self.cap)
        inputs = {"set": set_to_dict(L), "window": window.to_list() if window else None,
                  "radii": [e.r for e in estimates],
                  "center_samples": int(params.get("center_samples", 256)), "seed": int(params.get("seed", 42))}
        measured = {f"density_r{e.r:g}": e.density for e in estimates}
        if len(estimates) > 1:
            last, previous = estimates[-1].density, estimates[-2].density
            measured["relative_change"] = abs(last - previous) / max(abs(last), 1e-300)
        notes = []
        if params.get("sigma") is not None and L.dim == 1:
            verdict = nyquist_check_1d(float(params["sigma"]), estimates[-1].density)
            measured["nyquist_margin"] = verdict.margin
            notes.append("sampling predicted" if verdict.sampling_predicted else "sampling not predicted")
        expected = params.get("expected")
        if expected is None:
            return [VerificationReport.informational("density", inputs, measured, notes)]
        expected = float(expected)
        relative = abs(estimates[-1].density / expected - 1.0)
        return [VerificationReport.build("density", inputs, measured, {"expected": expected},
                                         margin=DENSITY_TOLERANCE - relative, notes=notes)]

    # Extremal and sharpness handlers
    def _handle_extremal(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Windowed sup over lattice max for one spacing"""
        return [extremal_report(float(params.get("sigma", 1.0)), float(params["spacing"]),
                                float(params.get("window_length", 60.0)), x_star=params.get("x_star"),
                                cap=self.cap, **self.lp_limits)]

    def _handle_extremal_sweep(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """One extremal report per spacing"""
        return extremal_sweep(float(params.get("sigma", 1.0)), params.get("spacings", [2.0, 2.5, 2.9, 3.1]),
                              float(params.get("window_length", 60.0)), self.cap, **self.lp_limits)

    def _handle_landau_demo(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Ratio growth with the window for spacing ``a``"""
        options = {"half_widths": params["half_widths"]} if params.get("half_widths") else {}
        return [landau_necessity_demo(float(params.get("sigma", 1.0)), float(params["a"]),
                                      cap=self.cap, **self.lp_limits, **options)]

    def _construction_options(self, params: Dict[str, Any], dim: int) -> Dict[str, Any]:
        options: Dict[str, Any] = {"cap": self.cap, "probes": int(params.get("probes", 10_000))}
        if params.get("window") is not None:
            options["window"] = _window(params, dim)
        if params.get("sheet_step") is not None:
            options["sheet_step"] = float(params["sheet_step"])
        return options

    def _handle_counterexample(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Sharpness construction along ``direction`` (default e1)"""
        body = body_from_dict(params["body"])
        direction = params.get("direction") or [1.0] + [0.0] * (body.dim - 1)
        return [build_proposition1(body, direction, **self._construction_options(params, body.dim)).report]

    def _handle_classify_net(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Rho of a net body; attaches the construction when rho reaches pi/2"""
        S = body_from_dict(params["net_body"])
        body = body_from_dict(params["body"])
        result = classify_net_body(S, body, **self._construction_options(params, body.dim))
        inputs = {"net_body": body_to_dict(S), "body": body_to_dict(body)}
        measured = {"rho": result.rho, "samples": float(result.samples)}
        if result.samples:
            measured["constant"] = result.constant
            return [VerificationReport.informational("classify_net", inputs, measured)]
        return [VerificationReport.informational("classify_net", inputs, measured,
                                                 notes=["sharpness construction attached"]),
                result.counterexample.report]

    # One-dimensional handlers
    def _handle_lemma1(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Cosine lower bound for one family"""
        family = CosineFamily(np.asarray(params["amplitudes"], dtype=float),
                              np.asarray(params["omegas"], dtype=float), float(params.get("tau", 1.0)))
        return [check_lemma1(family, params.get("u_grid"), bool(params.get("extended", False)))]

    def _handle_lemma1_suite(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Cosine lower bound over seeded random families"""
        tau = float(params.get("tau", 1.0))
        extended = bool(params.get("extended", False))
        reports = []
        for i in range(int(params.get("count", 1000))):
            family = random_cosine_family(_rng(params, i), tau, int(params.get("max_terms", 8)))
            report = check_lemma1(family, extended=extended)
            report.inputs.update(seed=int(params.get("seed", 42)), instance=i)
            reports.append(report)
        return reports

    def _handle_rouche(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Sign changes and contour winding for one real trigonometric sum"""
        f = real_trigonometric(params["cos_coeffs"], params["sin_coeffs"], params["omegas"])
        return [check_rouche_mechanics(f, float(params.get("eps", 0.1)), int(params.get("N", 10)))]

    def _handle_rouche_suite(self, params: Dict[str, Any]) -> List[VerificationReport]:
        """Rouche mechanics over seeded random sums"""
        reports = []
        for i in range(int(params.get("count", 20))):
            f = random_rouche_function(_rng(params, i))
            report = check_rouche_mechanics(f, float(params.get("eps", 0.1)), int(params.get("N", 10)))
            report.inputs.update(seed=int(params.get("seed", 42)), instance=i)
            reports.append(report)
        return reports
