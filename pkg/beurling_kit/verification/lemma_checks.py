"""
Lemma Checks
The cosine minorant |g(u)| >= |g(0)| cos(τu) and the zero-counting
mechanics behind it
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import structlog

from ..errors import ConstructorViolationError, ParameterRangeError
from ..services.bandlimited import (
    BandlimitedFunction,
    cosine_sum,
    mollify_1d_lemma,
    real_trigonometric,
    sup_norm_on_window,
)
from ..services.windows import Window
from .reports import VerificationReport

logger = structlog.get_logger(__name__)

LEMMA_STEP = 1e-3
LEMMA_EDGE = 1e-3
RELATIVE_SLACK = 1e-9
REALITY_TOLERANCE = 1e-12
REALITY_SAMPLES = 257
SCAN_POINTS_PER_PI = 400
ROUCHE_SCALE = 0.95


@dataclass(frozen=True)
class CosineFamily:
    """g(u) = sum_k a_k cos(w_k u) with a_k >= 0 and |w_k| <= tau"""

    amplitudes: np.ndarray
    omegas: np.ndarray
    tau: float

    def function(self) -> BandlimitedFunction:
        return cosine_sum(self.amplitudes, self.omegas, self.tau)

    def to_dict(self) -> dict:
        return {"amplitudes": np.asarray(self.amplitudes).tolist(),
                "omegas": np.asarray(self.omegas).tolist(), "tau": self.tau}


def random_cosine_family(rng: np.random.Generator, tau: float = 1.0, max_terms: int = 8) -> CosineFamily:
    """Nonnegative amplitudes; the band edge ±tau is hit with probability 1/4"""
    count = int(rng.integers(1, max_terms + 1))
    amplitudes = rng.uniform(0.0, 1.0, size=count)
    omegas = rng.uniform(-tau, tau, size=count)
    if rng.uniform() < 0.25:
        omegas[0] = tau
    return CosineFamily(amplitudes, omegas, float(tau))


def default_lemma_grid(tau: float, extended: bool = False) -> np.ndarray:
    """Step 1e-3 on (-π/2τ, π/2τ) shrunk by 1e-3, or on (-π/τ, π/τ) when extended"""
    half = (math.pi / tau if extended else math.pi / (2.0 * tau)) - LEMMA_EDGE
    count = int(math.floor(2.0 * half / LEMMA_STEP)) + 1
    return -half + LEMMA_STEP * np.arange(count)


def check_lemma1(family: CosineFamily, u_grid: Optional[Sequence[float]] = None,
                 extended: bool = False) -> VerificationReport:
    """min over the grid of |g(u)| - g(0)cos(τu), passing at >= -1e-9·g(0)

    With ``extended`` the signed form g(u) >= g(0)cos(τu) is checked as well,
    on the doubled interval (-π/τ, π/τ).
    """
    g = family.function()
    tau = family.tau
    u = default_lemma_grid(tau) if u_grid is None else np.asarray(u_grid, dtype=float).reshape(-1)
    if np.any(np.abs(u) >= math.pi / (2.0 * tau)):
        raise ParameterRangeError("Lemma grid must lie strictly inside (-π/2τ, π/2τ)")

    g0 = float(np.asarray(family.amplitudes, dtype=float).sum())
    values = g.evaluate_many(u.reshape(-1, 1))
    gaps = np.abs(values) - g0 * np.cos(tau * u)
    worst = float(gaps.min(initial=np.inf))
    measured = {"g0": g0, "min_gap": worst, "argmin": float(u[int(np.argmin(gaps))]) if u.size else 0.0}
    margin = worst

    if extended:
        wide = default_lemma_grid(tau, extended=True)
        signed = g.evaluate_many(wide.reshape(-1, 1)).real - g0 * np.cos(tau * wide)
        measured["min_signed_gap"] = float(signed.min())
        margin = min(margin, measured["min_signed_gap"])

    report = VerificationReport.build(
        "lemma1",
        inputs={"family": family.to_dict(), "grid_points": int(u.size), "extended": extended},
        measured=measured,
        bound={"tolerance": RELATIVE_SLACK * g0},
        margin=margin,
        error_budget=RELATIVE_SLACK * g0,
    )
    logger.debug("Cosine minorant checked", terms=len(family.amplitudes), min_gap=worst, passed=report.passed)
    return report


def random_rouche_function(rng: np.random.Generator, max_terms: int = 6) -> BandlimitedFunction:
    """Real trigonometric sum on [-1, 1] with coefficient mass 0.95"""
    count = int(rng.integers(1, max_terms + 1))
    a = rng.normal(size=count)
    b = rng.normal(size=count)
    omegas = rng.uniform(0.0, 1.0, size=count)
    mass = float(np.hypot(a, b).sum())
    return real_trigonometric(ROUCHE_SCALE * a / mass, ROUCHE_SCALE * b / mass, omegas)


def _contour_points(N: int) -> np.ndarray:
    x, y = N * math.pi, float(N)
    return np.array([
        complex(x, y), complex(-x, y), complex(x, -y), complex(-x, -y),
        complex(0.0, y), complex(0.0, -y), complex(x, 0.0), complex(-x, 0.0),
    ])


def _validate_rouche_input(f: BandlimitedFunction, N: int) -> str:
    if f.dim != 1:
        raise ParameterRangeError(f"Zero-counting check needs a one-dimensional function, got dim {f.dim}")
    if f.max_frequency_norm > 1.0 + REALITY_TOLERANCE:
        raise ParameterRangeError(f"Band must lie in [-1, 1], got {f.max_frequency_norm}")
    t = np.linspace(-N * math.pi, N * math.pi, REALITY_SAMPLES)
    if np.abs(f.evaluate_many(t.reshape(-1, 1)).imag).max() > REALITY_TOLERANCE:
        raise ConstructorViolationError("Function is not real on the real axis")
    if f.coefficient_sum <= 1.0 + REALITY_TOLERANCE:
        return "coefficient mass"
    sup = sup_norm_on_window(f, Window.cube((N + 1) * math.pi, 1), 1e-3)
    if sup.upper > 1.0:
        raise ParameterRangeError(f"Need ||f|| <= 1, windowed bound is {sup.upper:.6g}")
    return "windowed grid"


def check_rouche_mechanics(f: BandlimitedFunction, eps: float, N: int) -> VerificationReport:
    """Sign alternation at kπ, 2N sign changes, and the contour growth bound for f_eps"""
    if N < 1:
        raise ParameterRangeError(f"N must be positive, got {N}")
    norm_source = _validate_rouche_input(f, N)
    f_eps = mollify_1d_lemma(f, eps)

    k = np.arange(-N, N + 1)
    at_nodes = np.cos(k * math.pi) - f_eps(k * math.pi).real
    alternation_failures = int(np.count_nonzero(np.sign(at_nodes) != (-1.0) ** k))

    t = np.linspace(-N * math.pi, N * math.pi, 2 * N * SCAN_POINTS_PER_PI + 1)
    h = np.cos(t) - f_eps(t).real
    positive = h > 0
    sign_changes = int(np.count_nonzero(positive[1:] != positive[:-1]))

    z = _contour_points(N)
    values = np.abs(f_eps(z))
    growth = np.exp(np.abs(z.imag)) / (eps * np.abs(z))
    contour_ratio = float((values / growth).max())
    dominance_gap = float((np.abs(np.cos(z)) - values).min())

    margin = min(-alternation_failures, -abs(sign_changes - 2 * N), (1.0 + RELATIVE_SLACK) - contour_ratio)
    report = VerificationReport.build(
        "rouche",
        inputs={"function": f.to_dict(), "eps": eps, "N": N},
        measured={
            "alternation_failures": alternation_failures,
            "sign_changes": sign_changes,
            "contour_ratio": contour_ratio,
            "dominance_gap": dominance_gap,
        },
        bound={"sign_changes": 2 * N, "contour_ratio": 1.0},
        margin=margin,
        notes=[f"norm bound from {norm_source}"],
    )
    logger.debug("Zero-counting mechanics checked", sign_changes=sign_changes, expected=2 * N,
                 contour_ratio=contour_ratio, passed=report.passed)
    return report
