"""
Theorem Checks
The sampling inequality ||f||_inf <= (1/cos rho)·||f|_Λ||_inf on concrete
instances, the ball-case constant 1/(1 - sin rho), and their comparison
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..errors import (
    ConstructorViolationError,
    EmptySetError,
    HypothesisViolationError,
    InvalidBodyError,
    ParameterRangeError,
)
from ..services.bandlimited import BandlimitedFunction, random_function, restrict_to_line, sup_norm_on_window
from ..services.convex_geometry import (
    BodyKind,
    ConvexBody,
    body_to_dict,
    contains,
    inradius,
    lipschitz_constant,
    polar_gauge_many,
    random_symmetric_polytope,
)
from ..services.sampling_sets import (
    CoveringEstimate,
    Lattice,
    PerturbedLattice,
    SamplingSet,
    covering_radius,
    materialize,
    periodic_lattice,
    set_to_dict,
)
from ..services.windows import DEFAULT_POINT_CAP, Window
from .reports import VerificationReport

logger = structlog.get_logger(__name__)

HALF_PI = math.pi / 2.0
SWEEP_STEPS = 157
STRICT_GAP = 1e-12
GRID_STEPS = {1: 0.02, 2: 0.1, 3: 0.25}
MAX_PERIOD = {1: 60.0, 2: 30.0, 3: 16.0}
POLYTOPE_DRAWS = 20
MIN_POLYTOPE_INRADIUS = 0.3
MAX_TARGET_RHO = 1.1
RHO_CEILING = 1.5


def constants_compare(rho: float) -> Tuple[float, float]:
    """(c2, c3) = (1/(1 - sin rho), 1/cos rho); c3 <= c2 on [0, π/2)"""
    if not 0.0 <= rho < HALF_PI:
        raise ParameterRangeError(f"rho must lie in [0, π/2), got {rho}")
    c2 = 1.0 / (1.0 - math.sin(rho))
    c3 = 1.0 / math.cos(rho)
    # cos + sin >= 1 on the quarter period
    if c3 > c2 * (1.0 + 1e-15):
        raise ArithmeticError(f"1/cos rho exceeds 1/(1 - sin rho) at rho={rho}")
    return c2, c3


def constants_report(rho: float) -> VerificationReport:
    c2, c3 = constants_compare(rho)
    gap = c2 - c3
    strict = rho == 0.0 or gap > STRICT_GAP
    return VerificationReport.build(
        "constants",
        inputs={"rho": rho},
        measured={"c3": c3, "gap": gap},
        bound={"c2": c2},
        margin=gap if strict else -1.0,
        notes=[] if strict else ["gap below strictness threshold away from rho = 0"],
    )


def constants_sweep(rhos: Optional[Sequence[float]] = None) -> List[VerificationReport]:
    """One report per rho; defaults to 0, 0.01, ..., 1.56"""
    if rhos is None:
        rhos = [round(0.01 * k, 2) for k in range(SWEEP_STEPS)]
    reports = [constants_report(float(rho)) for rho in rhos]
    logger.info("Constants swept", points=len(reports), failures=sum(not r.passed for r in reports))
    return reports


@dataclass(frozen=True)
class SamplingMeasurement:
    """Sup of |f| on the window, max of |f| on Λ and the certified covering radius"""

    covering: CoveringEstimate
    sup_estimate: float
    sup_error: float
    sup_argmax: np.ndarray
    lattice_max: float
    points: np.ndarray


def _check_spectrum(f: BandlimitedFunction, body: ConvexBody) -> None:
    if f.dim != body.dim:
        raise ConstructorViolationError(f"Function lives in dimension {f.dim}, body in {body.dim}")
    for t in f.frequencies:
        if not contains(body, t, tol=1e-12):
            raise ConstructorViolationError(f"Frequency {t.tolist()} lies outside {body.describe()}")


def measure_sampling(f: BandlimitedFunction, L: SamplingSet, body: ConvexBody, window: Window,
                     grid_step: float, probe_step: Optional[float] = None,
                     cap: int = DEFAULT_POINT_CAP) -> SamplingMeasurement:
    """Shared measurement; raises HypothesisViolationError when rho_cert >= π/2

    Samples are taken on ``window`` inflated by rho_cert/c_K, which holds the
    gauge-nearest sample of every window point.
    """
    _check_spectrum(f, body)
    covering = covering_radius(L, body, window, probe_step or grid_step, cap)
    if covering.rho_upper_certificate >= HALF_PI:
        raise HypothesisViolationError(
            f"Certified covering radius {covering.rho_upper_certificate:.6g} is not below π/2")
    sup = sup_norm_on_window(f, window, grid_step, cap)
    reach = covering.rho_upper_certificate / inradius(body)
    # materialize already adds the set's own window margin
    points = materialize(L, window.inflate(max(0.0, reach - L.window_margin)), cap)
    if len(points) == 0:
        raise EmptySetError(f"No samples within {reach:.4g} of the window")
    lattice_max = float(np.abs(f.evaluate_many(points)).max())
    return SamplingMeasurement(covering, sup.estimate, sup.error_bound, sup.argmax, lattice_max, points)


def _instance_inputs(f: BandlimitedFunction, L: SamplingSet, body: ConvexBody, window: Window,
                     grid_step: float, probe_step: Optional[float], seed: Optional[int]) -> Dict[str, Any]:
    return {
        "seed": seed,
        "body": body_to_dict(body),
        "set": set_to_dict(L),
        "function": f.to_dict(),
        "window": window.to_list(),
        "grid_step": grid_step,
        "probe_step": probe_step or grid_step,
    }


def line_reduction_trace(f: BandlimitedFunction, body: ConvexBody, x_hat: np.ndarray,
                         points: np.ndarray) -> Dict[str, float]:
    """Restrict f to the segment from x_hat to its gauge-nearest sample"""
    if len(points) == 0:
        nan = float("nan")
        return {"line_gauge": nan, "line_tau": nan, "line_g0": nan, "line_g1": nan}
    gauges = polar_gauge_many(body, points - x_hat)
    nearest = int(np.argmin(gauges))
    d = points[nearest] - x_hat
    if not np.any(d):
        value = abs(f.evaluate_many(x_hat[None, :])[0])
        return {"line_gauge": 0.0, "line_tau": 0.0, "line_g0": float(value), "line_g1": float(value)}
    g = restrict_to_line(f, x_hat, d)
    return {
        "line_gauge": float(gauges[nearest]),
        "line_tau": g.tau,
        "line_g0": float(abs(g(0.0))),
        "line_g1": float(abs(g(1.0))),
    }


def check_theorem3(f: BandlimitedFunction, L: SamplingSet, body: ConvexBody, window: Window,
                   grid_step: float, probe_step: Optional[float] = None,
                   cap: int = DEFAULT_POINT_CAP, seed: Optional[int] = None) -> VerificationReport:
    """Verify M <= m / cos(rho_cert) + grid error for one instance

    M is the grid sup of |f| on ``window`` and m the max of |f| over the
    materialized samples.
    """
    inputs = _instance_inputs(f, L, body, window, grid_step, probe_step, seed)
    measurement = measure_sampling(f, L, body, window, grid_step, probe_step, cap)
    rho_cert = measurement.covering.rho_upper_certificate
    bound = measurement.lattice_max / math.cos(rho_cert)
    trace = line_reduction_trace(f, body, measurement.sup_argmax, measurement.points)
    ratio = (measurement.sup_estimate / measurement.lattice_max if measurement.lattice_max > 0 else math.inf)

    report = VerificationReport.build(
        "theorem3",
        inputs=inputs,
        measured={
            "sup_estimate": measurement.sup_estimate,
            "ratio": ratio,
            "lattice_max": measurement.lattice_max,
            "rho_estimate": measurement.covering.rho_estimate,
            "rho_cert": rho_cert,
            "samples": len(measurement.points),
            **trace,
        },
        bound={"sup_bound": bound, "constant": 1.0 / math.cos(rho_cert)},
        margin=bound - measurement.sup_estimate,
        error_budget=measurement.sup_error,
    )
    logger.info("Sampling inequality checked", check="theorem3", margin=report.margin,
                budget=report.error_budget, rho_cert=rho_cert, passed=report.passed)
    return report


def check_theorem2_ball(f: BandlimitedFunction, L: SamplingSet, body: ConvexBody, window: Window,
                        grid_step: float, probe_step: Optional[float] = None,
                        cap: int = DEFAULT_POINT_CAP, seed: Optional[int] = None) -> VerificationReport:
    """The ball case with the weaker constant 1/(1 - sin rho)"""
    if body.kind is not BodyKind.BALL:
        raise InvalidBodyError(f"Ball-case inequality needs a ball, got {body.describe()}")
    inputs = _instance_inputs(f, L, body, window, grid_step, probe_step, seed)
    measurement = measure_sampling(f, L, body, window, grid_step, probe_step, cap)
    rho_cert = measurement.covering.rho_upper_certificate
    c2, c3 = constants_compare(rho_cert)
    bound = c2 * measurement.lattice_max
    return VerificationReport.build(
        "theorem2_ball",
        inputs=inputs,
        measured={
            "sup_estimate": measurement.sup_estimate,
            "lattice_max": measurement.lattice_max,
            "rho_cert": rho_cert,
        },
        bound={"sup_bound": bound, "constant": c2, "sharper_constant": c3},
        margin=bound - measurement.sup_estimate,
        error_budget=measurement.sup_error,
    )


@dataclass(frozen=True)
class Theorem3Instance:
    """A period-aligned instance: f and Λ are both invariant under period·Z^n"""

    f: BandlimitedFunction
    L: SamplingSet
    body: ConvexBody
    window: Window
    grid_step: float
    probe_step: float
    period: float


def _random_body(rng: np.random.Generator, dim: int, body_kind: str) -> ConvexBody:
    if body_kind == BodyKind.BALL.value:
        return ConvexBody.ball(dim, 1.0)
    if body_kind == BodyKind.BOX.value:
        return ConvexBody.box(rng.uniform(0.5, 1.0, size=dim))
    if body_kind == BodyKind.POLYTOPE.value:
        for _ in range(POLYTOPE_DRAWS):
            body = random_symmetric_polytope(dim, 2 * dim + 2, rng)
            if inradius(body) >= MIN_POLYTOPE_INRADIUS:
                return body
        return ConvexBody.polytope(np.eye(dim), symmetrize=True)
    raise InvalidBodyError(f"Unknown body kind {body_kind!r}")


def random_theorem3_instance(rng: np.random.Generator, dim: int, body_kind: str = "ball",
                             max_terms: int = 10, perturbed: Optional[bool] = None) -> Theorem3Instance:
    """Draw f with spectrum on (2π/P)Z^n ∩ K and Λ ⊇ P·Z^n

    Because both are P-periodic, one period window carries the exact global
    suprema of |f| and of |f| on Λ, and one period probes the covering radius.
    """
    body = _random_body(rng, dim, body_kind)
    c_body, C_body = inradius(body), lipschitz_constant(body)
    # the smallest frequency step c_K/k whose period fits the dimension's budget
    refinement = max(1, int(MAX_PERIOD.get(dim, MAX_PERIOD[3]) * c_body / (2.0 * math.pi)))
    frequency_spacing = c_body / refinement
    period = 2.0 * math.pi / frequency_spacing
    f = random_function(body, int(rng.integers(1, max_terms + 1)), rng,
                        frequency_spacing=frequency_spacing)

    grid_step = GRID_STEPS.get(dim, 0.25)
    # jitter adds at most 0.2·target to rho, the probe grid adds probe_slack
    probe_slack = grid_step * C_body * max(1.0, math.sqrt(dim) / 2.0)
    target_rho = rng.uniform(0.4, min(MAX_TARGET_RHO, (RHO_CEILING - probe_slack) / 1.2))
    spacing = 2.0 * target_rho / (C_body * math.sqrt(dim))
    divisions = np.diag(np.full(dim, math.ceil(period / spacing)))
    lattice = periodic_lattice(period, divisions)
    lattice = Lattice(lattice.basis, rng.uniform(0.0, 1.0, size=dim) * np.diag(lattice.basis))

    if perturbed is None:
        perturbed = bool(rng.integers(0, 2))
    margin = HALF_PI / c_body + spacing * math.sqrt(dim)
    if perturbed:
        jitter = float(rng.uniform(0.0, 0.1)) * spacing
        generator = PerturbedLattice(lattice, jitter, int(rng.integers(0, 2**31)), tuple(np.diag(divisions)))
        L = SamplingSet(generator, margin)
    else:
        L = SamplingSet(lattice, margin)

    window = Window(np.zeros(dim), np.full(dim, period))
    return Theorem3Instance(f, L, body, window, grid_step, grid_step, period)
