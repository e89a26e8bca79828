"""
Extremal Search
Lower bounds on the sampling constant from a polygonal LP relaxation of
max Re f(x*) subject to |f(λ)| <= 1 on the materialized samples
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import structlog

from ..errors import ConstructorViolationError, ParameterRangeError, ResourceCapError, WindowError
from ..services import lp_solver
from ..services.bandlimited import BandlimitedFunction
from ..services.convex_geometry import ConvexBody, as_vector, body_to_dict, contains
from ..services.sampling_sets import SamplingSet, covering_radius, integer_lattice, materialize, set_to_dict
from ..services.windows import DEFAULT_POINT_CAP, Window
from .reports import VerificationReport

logger = structlog.get_logger(__name__)

POLYGON_SIDES = 32
MAX_FREQUENCIES = 200
MAX_POINTS = 2000
BOUND_SLACK = 1e-6
LANDAU_HALF_WIDTHS = (10.0, 20.0, 40.0)
COVERING_PROBE_STEP = 1e-3


@dataclass(frozen=True)
class ExtremalResult:
    """Outcome of one adversarial solve

    ``ratio_lower_bound`` is |f(x*)| / max_λ |f(λ)| for the rescaled witness,
    so it is a valid lower bound on the sampling constant whatever the
    relaxation did. An unbounded LP reports an infinite ratio and no witness.
    """

    ratio_lower_bound: float
    certificate: Optional[BandlimitedFunction]
    status: str
    objective: float
    constraint_max: float
    points: int
    frequencies: int

    @property
    def unbounded(self) -> bool:
        return self.status == "unbounded"


def periodic_frequency_grid(sigma: float, window_length: float, spacing: float) -> np.ndarray:
    """Frequencies kΔ, |k| <= m, with mΔ = sigma and period 2π/Δ <= window_length - spacing

    A function on this grid attains its sup inside every interval of one
    period, so a window of length period + spacing holds a maximizer together
    with its nearest sample.
    """
    if not sigma > 0 or not spacing > 0:
        raise ParameterRangeError("sigma and spacing must be positive")
    if window_length <= spacing:
        raise WindowError(f"Window length {window_length} must exceed the sample spacing {spacing}")
    min_step = 2.0 * math.pi / (window_length - spacing)
    m = int(math.floor(sigma / min_step))
    if m < 1:
        raise WindowError(f"Window length {window_length} too short for band {sigma}")
    step = sigma / m
    return (step * np.arange(-m, m + 1)).reshape(-1, 1)


def _constraint_rows(frequencies: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Rows of Re(e^{-iφ_k} f(λ)) in the variables (Re c, Im c)"""
    phase = points @ frequencies.T
    cos_p, sin_p = np.cos(phase), np.sin(phase)
    angles = 2.0 * math.pi * np.arange(POLYGON_SIDES) / POLYGON_SIDES
    rows = []
    for phi in angles:
        # Re f = p cos - q sin, Im f = p sin + q cos
        re_part = math.cos(phi) * cos_p + math.sin(phi) * sin_p
        im_part = -math.cos(phi) * sin_p + math.sin(phi) * cos_p
        rows.append(np.hstack([re_part, im_part]))
    return np.vstack(rows)


def adversarial_ratio(body: ConvexBody, L: SamplingSet, x_star: Sequence[float],
                      freq_grid: np.ndarray, window: Window, cap: int = DEFAULT_POINT_CAP,
                      max_frequencies: int = MAX_FREQUENCIES,
                      max_points: int = MAX_POINTS) -> ExtremalResult:
    """Maximize Re f(x*) over coefficients on ``freq_grid`` with |f| <= 1 on Λ ∩ window

    The modulus constraints are relaxed to the circumscribed 32-gon. The LP
    is solved in its dual form (equality rows, one column per polygon side),
    and the primal witness is read off the active constraints.
    """
    freq_grid = np.atleast_2d(np.asarray(freq_grid, dtype=float))
    if freq_grid.shape[1] != body.dim and freq_grid.shape[0] == body.dim:
        freq_grid = freq_grid.T
    x_star = as_vector(x_star, body.dim, "x_star")
    if len(freq_grid) > max_frequencies:
        raise ResourceCapError(len(freq_grid), max_frequencies, "frequencies")
    for t in freq_grid:
        if not contains(body, t, tol=1e-12):
            raise ConstructorViolationError(f"Frequency {t.tolist()} lies outside {body.describe()}")
    if not window.contains(x_star[None, :])[0]:
        raise WindowError(f"x_star {x_star.tolist()} lies outside the window")

    points = materialize(L, window, cap)
    if len(points) > max_points:
        raise ResourceCapError(len(points), max_points, "constraint points")

    J = len(freq_grid)
    star_phase = freq_grid @ x_star
    objective = np.concatenate([np.cos(star_phase), -np.sin(star_phase)])
    rows = _constraint_rows(freq_grid, points)

    # dual: minimize 1·y subject to rows^T y = objective, y >= 0
    dual = lp_solver.solve(lp_solver.LinearProgram(
        c=-np.ones(len(rows)), A_eq=rows.T, b_eq=objective))
    result_inputs = dict(points=len(points), frequencies=J)

    if dual.status is lp_solver.LPStatus.INFEASIBLE:
        logger.info("Adversarial LP unbounded", **result_inputs)
        return ExtremalResult(math.inf, None, "unbounded", math.inf, math.nan, **result_inputs)
    if not dual.optimal:
        logger.warning("Adversarial LP did not reach optimality", status=dual.status.value, **result_inputs)
        status = "infeasible" if dual.status is lp_solver.LPStatus.UNBOUNDED else dual.status.value
        return ExtremalResult(math.nan, None, status, math.nan, math.nan, **result_inputs)

    # basic dual columns are the active polygon sides of the primal vertex
    active = dual.basis if dual.basis is not None and dual.basis.size else np.flatnonzero(dual.x > 1e-12)
    if active.size == 0:
        # objective vector is zero: f(x*) vanishes identically on this grid
        return ExtremalResult(0.0, None, "optimal", 0.0, 0.0, **result_inputs)
    primal, *_ = np.linalg.lstsq(rows[active], np.ones(active.size), rcond=None)
    coefficients = primal[:J] + 1j * primal[J:]
    witness = BandlimitedFunction(body, coefficients, freq_grid)

    constraint_max = float(np.abs(witness.evaluate_many(points)).max(initial=0.0))
    value = float(abs(witness(x_star)))
    if constraint_max <= 0.0:
        return ExtremalResult(math.inf if value > 0 else 0.0, None, "unbounded" if value > 0 else "optimal",
                              -dual.objective, constraint_max, **result_inputs)
    certificate = witness.scaled(1.0 / constraint_max)
    ratio = value / constraint_max
    logger.info("Adversarial ratio computed", ratio=ratio, objective=-dual.objective,
                constraint_max=constraint_max, iterations=dual.iterations, **result_inputs)
    return ExtremalResult(ratio, certificate, "optimal", -dual.objective, constraint_max, **result_inputs)


def _extremal_inputs(sigma: float, spacing: float, window: Window, grid: np.ndarray,
                     x_star: float) -> dict:
    return {
        "sigma": sigma,
        "spacing": spacing,
        "window": window.to_list(),
        "x_star": x_star,
        "frequencies": grid.reshape(-1).tolist(),
        "body": body_to_dict(ConvexBody.interval(sigma)),
        "set": set_to_dict(integer_lattice(1, spacing)),
    }


def extremal_report(sigma: float, spacing: float, window_length: float,
                    grid: Optional[np.ndarray] = None, x_star: Optional[float] = None,
                    cap: int = DEFAULT_POINT_CAP, max_frequencies: int = MAX_FREQUENCIES,
                    max_points: int = MAX_POINTS) -> VerificationReport:
    """Adversarial ratio for S = [-sigma, sigma], Λ = spacing·Z against 1/cos(rho_cert)"""
    body = ConvexBody.interval(sigma)
    L = integer_lattice(1, spacing)
    window = Window.cube(window_length / 2.0, 1)
    grid = periodic_frequency_grid(sigma, window_length, spacing) if grid is None else grid
    x_star = spacing / 2.0 if x_star is None else x_star
    inputs = _extremal_inputs(sigma, spacing, window, grid, x_star)

    result = adversarial_ratio(body, L, [x_star], grid, window, cap, max_frequencies, max_points)
    rho_cert = covering_radius(L, body, window, COVERING_PROBE_STEP * spacing, cap).rho_upper_certificate
    measured = {
        "ratio_lower_bound": result.ratio_lower_bound,
        "objective": result.objective,
        "constraint_max": result.constraint_max,
        "rho_cert": rho_cert,
    }
    if rho_cert >= math.pi / 2:
        return VerificationReport.informational(
            "extremal", inputs, measured, notes=[f"lp status {result.status}; covering radius not below π/2"])
    bound = 1.0 / math.cos(rho_cert)
    return VerificationReport.build(
        "extremal",
        inputs=inputs,
        measured=measured,
        bound={"inv_cos_rho": bound},
        margin=bound + BOUND_SLACK - result.ratio_lower_bound,
        notes=[f"lp status {result.status}"],
    )


def extremal_sweep(sigma: float, spacings: Sequence[float], window_length: float,
                   cap: int = DEFAULT_POINT_CAP, max_frequencies: int = MAX_FREQUENCIES,
                   max_points: int = MAX_POINTS) -> List[VerificationReport]:
    """One report per spacing, all on the grid built for the largest spacing"""
    spacings = [float(a) for a in spacings]
    grid = periodic_frequency_grid(sigma, window_length, max(spacings))
    reports = [extremal_report(sigma, a, window_length, grid=grid, cap=cap,
                               max_frequencies=max_frequencies, max_points=max_points) for a in spacings]
    ratios = [r.measured["ratio_lower_bound"] for r in reports]
    logger.info("Extremal sweep finished", spacings=spacings, ratios=ratios,
                nondecreasing=is_nondecreasing(ratios))
    return reports


def is_nondecreasing(values: Sequence[float], tol: float = 1e-9) -> bool:
    return all(b >= a - tol * max(1.0, abs(a)) for a, b in zip(values, values[1:]))


def landau_necessity_demo(sigma: float, a: float, half_widths: Sequence[float] = LANDAU_HALF_WIDTHS,
                          cap: int = DEFAULT_POINT_CAP, max_frequencies: int = MAX_FREQUENCIES,
                          max_points: int = MAX_POINTS) -> VerificationReport:
    """Adversarial ratios on growing windows for S = [-sigma, sigma], Λ = aZ

    Below the Nyquist density the ratio sequence is reported as evidence;
    above it every ratio must respect 1/cos(sigma·a/2); at a = π/sigma there
    is no verdict.
    """
    if not sigma > 0 or not a > 0:
        raise ParameterRangeError("sigma and a must be positive")
    body = ConvexBody.interval(sigma)
    L = integer_lattice(1, a)
    ratios, statuses = [], []
    for half_width in half_widths:
        window = Window.cube(half_width, 1)
        grid = periodic_frequency_grid(sigma, 2.0 * half_width, a)
        result = adversarial_ratio(body, L, [a / 2.0], grid, window, cap, max_frequencies, max_points)
        ratios.append(result.ratio_lower_bound)
        statuses.append(result.status)

    measured = {f"ratio_w{int(h) if float(h).is_integer() else h}": r for h, r in zip(half_widths, ratios)}
    nondecreasing = is_nondecreasing(ratios)
    measured["nondecreasing"] = float(nondecreasing)
    density, threshold = 1.0 / a, sigma / math.pi
    inputs = {"sigma": sigma, "a": a, "half_widths": list(half_widths), "density": density,
              "nyquist": threshold}
    notes = [f"lp statuses {statuses}"]

    if math.isclose(density, threshold, rel_tol=1e-12):
        notes.append("critical density; no verdict")
        return VerificationReport.informational("landau_demo", inputs, measured, notes)
    if density < threshold:
        notes.append("subcritical density; ratios reported as a trend only")
        return VerificationReport.informational("landau_demo", inputs, measured, notes)

    bound = 1.0 / math.cos(sigma * a / 2.0)
    return VerificationReport.build(
        "landau_demo",
        inputs=inputs,
        measured=measured,
        bound={"inv_cos_rho": bound},
        margin=bound + BOUND_SLACK - max(ratios),
        notes=notes,
    )
