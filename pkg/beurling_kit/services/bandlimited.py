"""
Band-limited Function Service
Finite exponential sums with spectrum in a convex body, line restrictions
and the two mollifier constructions
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np
import structlog

from ..errors import (
    ConstructorViolationError,
    DimensionMismatchError,
    ParameterRangeError,
    ZeroDirectionError,
)
from .convex_geometry import (
    BodyKind,
    ConvexBody,
    as_vector,
    body_from_dict,
    body_to_dict,
    contains,
    inflate_by_cube,
    inradius,
    lipschitz_constant,
    polar_gauge,
    sign_vectors,
    support_function_many,
)
from .windows import DEFAULT_POINT_CAP, Window

logger = structlog.get_logger(__name__)

MEMBERSHIP_TOLERANCE = 1e-12
SINC_SERIES_THRESHOLD = 1e-4


@dataclass(frozen=True, eq=False)
class BandlimitedFunction:
    """f(x) = sum_j c_j exp(i t_j·x) with every t_j in ``body``"""

    body: ConvexBody
    coefficients: np.ndarray
    frequencies: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        T = np.asarray(self.frequencies, dtype=float).reshape(-1, self.body.dim) if c.size else \
            np.zeros((0, self.body.dim))
        if c.ndim != 1 or T.shape[0] != c.size:
            raise ConstructorViolationError(
                f"{c.size} coefficients but {T.shape[0]} frequencies")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(T))):
            raise ConstructorViolationError("Non-finite coefficient or frequency")
        for t in T:
            if not contains(self.body, t, MEMBERSHIP_TOLERANCE):
                raise ConstructorViolationError(
                    f"Frequency {t.tolist()} lies outside the spectral body {self.body.describe()}")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "frequencies", T)

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def n_terms(self) -> int:
        return int(self.coefficients.size)

    @cached_property
    def coefficient_sum(self) -> float:
        """sum |c_j|, an upper bound for the sup norm"""
        return float(np.abs(self.coefficients).sum())

    @cached_property
    def max_frequency_norm(self) -> float:
        if not self.n_terms:
            return 0.0
        return float(np.linalg.norm(self.frequencies, axis=1).max())

    @property
    def gradient_bound(self) -> float:
        """L = sum|c_j| · max|t_j|; Lipschitz constant of f in the Euclidean metric"""
        return self.coefficient_sum * self.max_frequency_norm

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Values at the rows of X; complex rows are allowed (entire extension)"""
        X = np.asarray(X)
        if X.ndim == 1:
            X = X.reshape(-1, self.dim) if self.dim == 1 else X[None, :]
        if X.shape[1] != self.dim:
            raise DimensionMismatchError(self.dim, X.shape[1])
        if not self.n_terms:
            return np.zeros(X.shape[0], dtype=complex)
        return np.exp(1j * (X @ self.frequencies.T)) @ self.coefficients

    def __call__(self, x: Any) -> Union[complex, np.ndarray]:
        X = np.asarray(x)
        if X.ndim <= 1 and (self.dim > 1 or X.ndim == 0):
            return complex(self.evaluate_many(X.reshape(1, -1))[0])
        return self.evaluate_many(X)

    def scaled(self, factor: complex) -> "BandlimitedFunction":
        return BandlimitedFunction(self.body, self.coefficients * factor, self.frequencies)

    def with_body(self, body: ConvexBody) -> "BandlimitedFunction":
        return BandlimitedFunction(body, self.coefficients, self.frequencies)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "body": body_to_dict(self.body),
            "terms": [
                {"re": float(c.real), "im": float(c.imag), "freq": t.tolist()}
                for c, t in zip(self.coefficients, self.frequencies)
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BandlimitedFunction":
        body = body_from_dict(data["body"])
        terms = data.get("terms", [])
        return cls(
            body,
            np.array([complex(t.get("re", 0.0), t.get("im", 0.0)) for t in terms], dtype=complex),
            np.array([t["freq"] for t in terms], dtype=float).reshape(-1, body.dim),
        )


@dataclass(frozen=True)
class SupNormEstimate:
    """Grid maximum of |f| and the bracket [estimate, estimate + error_bound]"""

    estimate: float
    error_bound: float
    argmax: np.ndarray
    nodes: int

    @property
    def upper(self) -> float:
        return self.estimate + self.error_bound


def evaluate(f: BandlimitedFunction, x: Any) -> complex:
    """Direct summation of the finite exponential sum at one point"""
    x = as_vector(x, f.dim)
    return complex(f.evaluate_many(x[None, :])[0])


def sup_norm_on_window(f: BandlimitedFunction, window: Window, grid_step: float,
                       cap: int = DEFAULT_POINT_CAP) -> SupNormEstimate:
    """Grid estimate of sup |f| over ``window`` with a certified Lipschitz bracket"""
    window.check_dim(f.dim)
    estimate, argmax, nodes = -1.0, window.lower.copy(), 0
    for chunk in window.grid_chunks(grid_step, cap):
        values = np.abs(f.evaluate_many(chunk))
        k = int(np.argmax(values))
        if values[k] > estimate:
            estimate, argmax = float(values[k]), chunk[k].copy()
        nodes += len(chunk)
    error_bound = f.gradient_bound * grid_step * np.sqrt(f.dim) / 2.0
    logger.debug("Sup norm estimated", nodes=nodes, estimate=estimate, error_bound=error_bound)
    return SupNormEstimate(estimate, float(error_bound), argmax, nodes)


@dataclass(frozen=True, eq=False)
class LineRestriction:
    """g(u) = f(x0 + u·d), band-limited to [-tau, tau]"""

    base: np.ndarray
    direction: np.ndarray
    parent: BandlimitedFunction
    tau: float
    gauge_bound: float
    phases: np.ndarray
    omegas: np.ndarray

    def __call__(self, u: Any) -> Union[complex, np.ndarray]:
        u_arr = np.asarray(u)
        values = np.exp(1j * np.multiply.outer(u_arr.reshape(-1), self.omegas)) @ self.phases
        return complex(values[0]) if u_arr.ndim == 0 else values.reshape(u_arr.shape)

    @property
    def coefficient_sum(self) -> float:
        return float(np.abs(self.phases).sum())

    def to_function(self) -> BandlimitedFunction:
        """The restriction as a one-dimensional band-limited function on [-h_K(d), h_K(d)]"""
        if self.gauge_bound <= 0:
            raise ZeroDirectionError("Direction has zero gauge; band is a single point")
        return BandlimitedFunction(ConvexBody.interval(self.gauge_bound), self.phases,
                                   self.omegas.reshape(-1, 1))


def restrict_to_line(f: BandlimitedFunction, x0: Any, d: Any) -> LineRestriction:
    """Restrict f to the line through x0 with direction d and certify its band"""
    x0 = as_vector(x0, f.dim, "base point")
    d = as_vector(d, f.dim, "direction")
    if not np.any(d):
        raise ZeroDirectionError("Line direction must be nonzero")
    omegas = f.frequencies @ d
    phases = f.coefficients * np.exp(1j * (f.frequencies @ x0))
    tau = float(np.abs(omegas).max(initial=0.0))
    gauge_bound = polar_gauge(f.body, d)
    if tau > gauge_bound + MEMBERSHIP_TOLERANCE * max(1.0, gauge_bound):
        raise ConstructorViolationError(
            f"Line band {tau} exceeds the polar gauge bound {gauge_bound}")
    return LineRestriction(x0, d, f, tau, gauge_bound, phases, omegas)


def mollify_nd(f: BandlimitedFunction, eps: float) -> BandlimitedFunction:
    """f(x)·prod_i cos(eps·x_i/sqrt(n)), expanded back into exponentials

    Every new frequency is t_j + (eps/sqrt(n))·s with s in {-1, 1}^n, so it
    sits at distance exactly eps from t_j. The declared body is K plus the
    cube of half-side eps/sqrt(n), which lies inside K + eps·B.
    """
    if not eps > 0:
        raise ParameterRangeError(f"Mollifier eps must be positive, got {eps}")
    a = eps / np.sqrt(f.dim)
    shifts = a * sign_vectors(f.dim)
    weight = 0.5 ** f.dim
    frequencies = (f.frequencies[:, None, :] + shifts[None, :, :]).reshape(-1, f.dim)
    coefficients = np.repeat(f.coefficients * weight, len(shifts))
    body = inflate_by_cube(f.body, a)
    logger.debug("Mollified", eps=eps, terms_in=f.n_terms, terms_out=coefficients.size)
    return BandlimitedFunction(body, coefficients, frequencies)


def mollifier_band_excess(eps: float, d: Any) -> float:
    """delta(eps): how far the mollified line restriction's band exceeds tau along d

    (eps/√n)·‖d‖₁ is attained by a corner shift of the cosine product, so it is the
    sharpest valid bound; eps·max|d_i|/√n understates it off the coordinate axes.
    """
    d = as_vector(d, what="direction")
    return float(eps / np.sqrt(d.size) * np.abs(d).sum())


def stable_sinc(w: Any) -> np.ndarray:
    """sin(w)/w for complex w, by a Taylor series near zero"""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w) < SINC_SERIES_THRESHOLD
    w2 = w[small] ** 2
    out[small] = 1.0 - w2 / 6.0 + w2 ** 2 / 120.0 - w2 ** 3 / 5040.0
    out[~small] = np.sin(w[~small]) / w[~small]
    return out


OneDimensional = Union[LineRestriction, BandlimitedFunction, Callable[[np.ndarray], np.ndarray]]


def _as_callable(g: OneDimensional) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(g, BandlimitedFunction):
        if g.dim != 1:
            raise DimensionMismatchError(1, g.dim, "function")
        return lambda z: g.evaluate_many(np.asarray(z).reshape(-1, 1))
    if isinstance(g, LineRestriction):
        return lambda z: np.asarray(g(np.asarray(z).reshape(-1))).reshape(-1)
    return lambda z: np.asarray(g(np.asarray(z).reshape(-1)), dtype=complex).reshape(-1)


@dataclass(frozen=True, eq=False)
class LemmaMollifier:
    """f_eps(z) = (1 - eps)·sin(eps z)/(eps z)·f((1 - eps) z)"""

    source: OneDimensional
    eps: float

    def __call__(self, z: Any) -> Union[complex, np.ndarray]:
        z_arr = np.asarray(z, dtype=complex)
        flat = z_arr.reshape(-1)
        inner = _as_callable(self.source)((1.0 - self.eps) * flat)
        values = (1.0 - self.eps) * stable_sinc(self.eps * flat) * inner
        return complex(values[0]) if z_arr.ndim == 0 else values.reshape(z_arr.shape)


def mollify_1d_lemma(g: OneDimensional, eps: float) -> LemmaMollifier:
    if not 0.0 < eps < 1.0:
        raise ParameterRangeError(f"Lemma mollifier needs 0 < eps < 1, got {eps}")
    return LemmaMollifier(g, float(eps))


def sine_wave(body: ConvexBody, t0: Any) -> BandlimitedFunction:
    """sin(x·t0) as the two-term sum (e^{i t0·x} - e^{-i t0·x}) / 2i"""
    t0 = as_vector(t0, body.dim, "frequency")
    return BandlimitedFunction(body, np.array([1 / 2j, -1 / 2j]), np.vstack([t0, -t0]))


def cosine_sum(amplitudes: Sequence[float], omegas: Sequence[float], tau: float) -> BandlimitedFunction:
    """g(u) = sum_k a_k cos(w_k u) with a_k >= 0 and |w_k| <= tau

    The nonnegative coefficients force g(0) = sum a_k = sup |g|.
    """
    a = np.asarray(amplitudes, dtype=float).reshape(-1)
    w = np.asarray(omegas, dtype=float).reshape(-1)
    if a.size != w.size:
        raise ConstructorViolationError(f"{a.size} amplitudes but {w.size} frequencies")
    if np.any(a < 0):
        raise ConstructorViolationError("Cosine family needs nonnegative amplitudes")
    if not tau > 0 or np.any(np.abs(w) > tau + MEMBERSHIP_TOLERANCE):
        raise ConstructorViolationError(f"Cosine family frequencies must lie in [-{tau}, {tau}]")
    zero = w == 0
    coefficients = np.concatenate([a[zero], a[~zero] / 2, a[~zero] / 2]).astype(complex)
    frequencies = np.concatenate([w[zero], w[~zero], -w[~zero]]).reshape(-1, 1)
    return BandlimitedFunction(ConvexBody.interval(tau), coefficients, frequencies)


def real_trigonometric(cos_coeffs: Sequence[float], sin_coeffs: Sequence[float],
                       omegas: Sequence[float], band: float = 1.0) -> BandlimitedFunction:
    """f(t) = sum_k a_k cos(w_k t) + b_k sin(w_k t), real on the real axis"""
    a = np.asarray(cos_coeffs, dtype=float).reshape(-1)
    b = np.asarray(sin_coeffs, dtype=float).reshape(-1)
    w = np.asarray(omegas, dtype=float).reshape(-1)
    coefficients = np.concatenate([(a - 1j * b) / 2, (a + 1j * b) / 2])
    frequencies = np.concatenate([w, -w]).reshape(-1, 1)
    return BandlimitedFunction(ConvexBody.interval(band), coefficients, frequencies)


def random_frequencies(body: ConvexBody, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` points drawn inside K"""
    n = body.dim
    if body.kind is BodyKind.BALL:
        directions = rng.normal(size=(count, n))
        directions /= np.maximum(np.linalg.norm(directions, axis=1, keepdims=True), 1e-300)
        return directions * body.radius * rng.uniform(size=(count, 1)) ** (1.0 / n)
    if body.kind is BodyKind.BOX:
        return rng.uniform(-1.0, 1.0, size=(count, n)) * body.half_widths
    weights = rng.dirichlet(np.ones(len(body.vertices)), size=count)
    return weights @ body.vertices


def frequency_lattice_points(body: ConvexBody, spacing: float) -> np.ndarray:
    """All points of spacing·Z^n inside K"""
    reach = int(np.floor(lipschitz_constant(body) / spacing))
    axis = spacing * np.arange(-reach, reach + 1)
    grid = np.stack([g.ravel() for g in np.meshgrid(*([axis] * body.dim), indexing="ij")], axis=1)
    norms = np.linalg.norm(grid, axis=1)
    surely_inside = norms <= inradius(body) - MEMBERSHIP_TOLERANCE
    undecided = ~surely_inside & (norms ** 2 <= support_function_many(body, grid) + MEMBERSHIP_TOLERANCE)
    keep = surely_inside.copy()
    for i in np.flatnonzero(undecided):
        keep[i] = contains(body, grid[i], MEMBERSHIP_TOLERANCE)
    return grid[keep]


def random_function(body: ConvexBody, n_terms: int, rng: np.random.Generator,
                    coefficient_scale: float = 1.0,
                    frequency_spacing: Optional[float] = None) -> BandlimitedFunction:
    """Random finite sum with spectrum in K

    With ``frequency_spacing`` the frequencies are drawn without replacement
    from spacing·Z^n ∩ K, so f is periodic with period 2π/spacing per axis.
    """
    if n_terms < 1:
        raise ParameterRangeError(f"Need at least one term, got {n_terms}")
    if frequency_spacing is None:
        frequencies = random_frequencies(body, n_terms, rng)
    else:
        pool = frequency_lattice_points(body, frequency_spacing)
        picks = rng.choice(len(pool), size=min(n_terms, len(pool)), replace=False)
        frequencies = pool[np.sort(picks)]
    coefficients = coefficient_scale * (rng.normal(size=len(frequencies)) + 1j * rng.normal(size=len(frequencies)))
    return BandlimitedFunction(body, coefficients, frequencies)
