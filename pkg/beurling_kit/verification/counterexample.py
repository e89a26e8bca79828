"""
Sharpness Counterexample
At covering radius π/2 the constant 1/cos rho blows up: sin(x·t0) vanishes
on the sheets x·t0 ∈ πZ, which cover R^n by the segment [-x0, x0]
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import structlog
from scipy.spatial import cKDTree

from ..errors import EmptySetError, ParameterRangeError, ZeroDirectionError
from ..services.bandlimited import BandlimitedFunction, sine_wave, sup_norm_on_window
from ..services.convex_geometry import (
    BodyKind,
    ConvexBody,
    as_vector,
    body_to_dict,
    polar_gauge,
    polar_gauge_many,
    sign_vectors,
    support_function,
)
from ..services.sampling_sets import HyperplaneLattice, SamplingSet, materialize
from ..services.windows import DEFAULT_POINT_CAP, Window, default_window
from .reports import VerificationReport

logger = structlog.get_logger(__name__)

LATTICE_ZERO_TOLERANCE = 1e-12
SUP_TOLERANCE = 1e-6
SUP_WINDOW_HALF_WIDTH = 0.05
SUP_GRID_STEP = 0.01
DEFAULT_PROBES = 10_000
TIE_TOLERANCE = 1e-12
GAP_TOLERANCE = 1e-9
SHEET_STEPS = {1: 1.0, 2: 0.05, 3: 0.25}


@dataclass(frozen=True)
class SharpnessConstruction:
    """f, Λ and S = [-x0, x0] with the verification report"""

    f: BandlimitedFunction
    L: SamplingSet
    segment: ConvexBody
    t0: np.ndarray
    x0: np.ndarray
    report: VerificationReport
    tie_break: Optional[str] = None


def extreme_frequency(body: ConvexBody, u: np.ndarray) -> Tuple[np.ndarray, Optional[str]]:
    """argmax of u·t over K with a deterministic tie-break

    Returns the point and a note describing the tie-break, if one was needed.
    """
    if body.kind is BodyKind.BALL:
        return body.radius * u / np.linalg.norm(u), None
    if body.kind is BodyKind.BOX:
        zero = u == 0
        t0 = body.half_widths * np.where(zero, -1.0, np.sign(u))
        note = None
        if zero.any():
            note = f"zero components {np.flatnonzero(zero).tolist()} set to the lower face"
        return t0, note
    scores = body.vertices @ u
    best = scores.max()
    ties = np.flatnonzero(scores >= best - TIE_TOLERANCE * max(1.0, abs(best)))
    candidates = body.vertices[ties]
    # lexicographically smallest: np.lexsort sorts by its last key first
    pick = candidates[np.lexsort(candidates.T[::-1])[0]]
    note = None
    if len(ties) > 1:
        note = f"{len(ties)} maximizing vertices; picked lexicographically smallest {pick.tolist()}"
    return pick, note


def segment_gaps(tree: cKDTree, t0: np.ndarray, x0: np.ndarray, probes: np.ndarray) -> np.ndarray:
    """Per probe y, the distance from the best point of y - [-1, 1]·x0 on a sheet to Λ

    The segment meets sheet k at τ = 2(y·t0 - πk)/π; only |τ| <= 1 counts.
    ``tree`` holds the materialized points.
    """
    s = probes @ t0
    nearest = np.round(s / math.pi)
    gaps = np.full(len(probes), np.inf)
    for offset in (-1.0, 0.0, 1.0):
        tau = 2.0 * (s - math.pi * (nearest + offset)) / math.pi
        admissible = np.abs(tau) <= 1.0 + 1e-12
        if not admissible.any():
            continue
        landing = probes[admissible] - tau[admissible, None] * x0
        dist, _ = tree.query(landing)
        gaps[admissible] = np.minimum(gaps[admissible], dist)
    return gaps


def build_proposition1(body: ConvexBody, direction, window: Optional[Window] = None,
                       sheet_step: Optional[float] = None, probes: int = DEFAULT_PROBES,
                       cap: int = DEFAULT_POINT_CAP) -> SharpnessConstruction:
    """Build the vanishing sine wave for the direction u and verify it

    Coverage by the segment is measured on a grid of about ``probes`` nodes
    over ``window`` against the materialized sheet points.
    """
    u = as_vector(direction, body.dim, "direction")
    if not np.any(u):
        raise ZeroDirectionError("Direction must be nonzero")
    t0, tie_break = extreme_frequency(body, u)
    h = support_function(body, u)
    x0 = (math.pi / (2.0 * h)) * u
    f = sine_wave(body, t0)
    step = sheet_step or SHEET_STEPS.get(body.dim, 0.25)
    L = SamplingSet(HyperplaneLattice(t0, step))
    segment = ConvexBody.segment(x0)
    window = window or default_window(body.dim)
    window.check_dim(body.dim)
    if probes < 1:
        raise ParameterRangeError(f"Probe count must be positive, got {probes}")

    # sheet grid cells have half-diagonal `mesh`; landing points sit within |x0| of the window
    mesh = step * math.sqrt(body.dim - 1) / 2.0
    points = materialize(L, window.inflate(float(np.linalg.norm(x0)) + step * math.sqrt(body.dim)), cap)
    if len(points) == 0:
        raise EmptySetError("No sheet points near the window")
    lattice_max = float(np.abs(f.evaluate_many(points)).max())
    local = Window(x0 - SUP_WINDOW_HALF_WIDTH, x0 + SUP_WINDOW_HALF_WIDTH)
    sup = sup_norm_on_window(f, local, SUP_GRID_STEP, cap)

    tree = cKDTree(points)
    probe_step = float(np.prod(window.widths) / probes) ** (1.0 / body.dim)
    covered, total, worst_gap = 0, 0, 0.0
    for chunk in window.grid_chunks(probe_step, cap):
        gaps = segment_gaps(tree, t0, x0, chunk)
        covered += int(np.count_nonzero(gaps <= mesh + GAP_TOLERANCE))
        total += len(chunk)
        worst_gap = max(worst_gap, float(gaps.max()))
    covered_fraction = covered / total

    margins = [
        LATTICE_ZERO_TOLERANCE - lattice_max,
        sup.estimate - (1.0 - SUP_TOLERANCE),
        covered_fraction - 1.0,
    ]
    report = VerificationReport.build(
        "proposition1",
        inputs={
            "body": body_to_dict(body),
            "direction": u.tolist(),
            "window": window.to_list(),
            "sheet_step": step,
            "probes": total,
            "probe_step": probe_step,
        },
        measured={
            "lattice_max": lattice_max,
            "sup_estimate": sup.estimate,
            "covered_fraction": covered_fraction,
            "segment_gap": worst_gap,
            "sheet_mesh": mesh,
            "lattice_points": len(points),
            "x0_gauge": polar_gauge(body, x0),
            "t0_dot_x0": float(t0 @ x0),
        },
        bound={
            "lattice_max": LATTICE_ZERO_TOLERANCE,
            "sup_estimate": 1.0 - SUP_TOLERANCE,
            "covered_fraction": 1.0,
        },
        margin=min(margins),
        notes=[tie_break] if tie_break else [],
    )
    logger.info("Sharpness construction built", body=body.describe(), t0=t0.tolist(),
                x0=x0.tolist(), lattice_points=len(points), passed=report.passed)
    return SharpnessConstruction(f, L, segment, t0, x0, report, tie_break)


@dataclass(frozen=True)
class NetClassification:
    """Whether every Λ with Λ + S = R^n samples the Bernstein space of K"""

    rho: float
    samples: bool
    constant: Optional[float]
    extreme_point: np.ndarray
    counterexample: Optional[SharpnessConstruction] = field(default=None, repr=False)


def _gauge_extreme_point(S: ConvexBody, body: ConvexBody) -> np.ndarray:
    if S.kind is BodyKind.BALL:
        if body.kind is BodyKind.BALL:
            u = np.eye(body.dim)[0]
        elif body.kind is BodyKind.BOX:
            u = body.half_widths / np.linalg.norm(body.half_widths)
        else:
            longest = body.vertices[np.argmax(np.linalg.norm(body.vertices, axis=1))]
            u = longest / np.linalg.norm(longest)
        return S.radius * u
    if S.kind is BodyKind.BOX:
        candidates = sign_vectors(S.dim) * S.half_widths
    else:
        candidates = S.vertices
    return candidates[int(np.argmax(polar_gauge_many(body, candidates)))]


def classify_net_body(S: ConvexBody, body: ConvexBody, build_counterexample: bool = True,
                      **construction_options) -> NetClassification:
    """rho_S = max of ||·||_{K°} over S decides sampling

    Below π/2 every such Λ samples with constant 1/cos rho_S; at or above it
    the sharpness construction runs along the maximizing point of S.
    """
    extreme = _gauge_extreme_point(S, body)
    rho = polar_gauge(body, extreme)
    if rho < math.pi / 2.0:
        return NetClassification(rho, True, 1.0 / math.cos(rho), extreme)
    construction = build_proposition1(body, extreme, **construction_options) if build_counterexample else None
    return NetClassification(rho, False, None, extreme, construction)
