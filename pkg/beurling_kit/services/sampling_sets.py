"""
Sampling Set Service
Point-set generators, gauge covering radius, lower uniform density and the
one-dimensional Nyquist test
"""

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy.spatial import cKDTree
from scipy.special import gamma

from ..errors import (
    DimensionMismatchError,
    EmptySetError,
    InvalidBodyError,
    ParameterRangeError,
    ResourceCapError,
    WindowError,
)
from .convex_geometry import (
    BodyKind,
    ConvexBody,
    as_vector,
    inradius,
    lipschitz_constant,
    polar_gauge_many,
    sign_vectors,
)
from .windows import DEFAULT_POINT_CAP, Window

logger = structlog.get_logger(__name__)

NEIGHBOURS = 8
DENSITY_GRID_PER_AXIS = 5


def _index_ranges(basis_inverse: np.ndarray, offset: np.ndarray, window: Window) -> List[np.ndarray]:
    coords = (window.corners() - offset) @ basis_inverse.T
    lo = np.floor(coords.min(axis=0) - 1e-9).astype(int)
    hi = np.ceil(coords.max(axis=0) + 1e-9).astype(int)
    return [np.arange(a, b + 1) for a, b in zip(lo, hi)]


def _candidate_indices(ranges: List[np.ndarray], cap: int) -> np.ndarray:
    total = int(np.prod([r.size for r in ranges], dtype=object))
    if total > cap * (1 << len(ranges)):
        raise ResourceCapError(total, cap, "lattice candidates")
    grids = np.meshgrid(*ranges, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _enforce_cap(points: np.ndarray, cap: int) -> np.ndarray:
    if len(points) > cap:
        raise ResourceCapError(len(points), cap)
    return points


@dataclass(frozen=True, eq=False)
class Lattice:
    """{offset + A k : k in Z^n}; the columns of ``basis`` generate the lattice"""

    basis: np.ndarray
    offset: Optional[np.ndarray] = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatchError(A.shape[0], A.shape[1], "lattice basis")
        if abs(np.linalg.det(A)) < 1e-12 * max(1.0, np.abs(A).max()) ** A.shape[0]:
            raise ParameterRangeError("Lattice basis is singular")
        offset = np.zeros(A.shape[0]) if self.offset is None else as_vector(self.offset, A.shape[0], "offset")
        object.__setattr__(self, "basis", A)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def cell_volume(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    @property
    def cell_diameter(self) -> float:
        return float(np.linalg.norm(sign_vectors(self.dim) @ self.basis.T, axis=1).max())

    def fundamental_box(self) -> Window:
        """Bounding box of offset + A[0, 1]^n; sweeping it sweeps every residue class"""
        corners = self.offset + ((sign_vectors(self.dim) + 1) / 2) @ self.basis.T
        return Window(corners.min(axis=0), corners.max(axis=0))

    def indices_in(self, window: Window, cap: int) -> np.ndarray:
        ranges = _index_ranges(np.linalg.inv(self.basis), self.offset, window)
        K = _candidate_indices(ranges, cap)
        points = self.offset + K @ self.basis.T
        return K[window.contains(points, tol=1e-12)]

    def points_in(self, window: Window, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
        K = self.indices_in(window, cap)
        return _enforce_cap(self.offset + K @ self.basis.T, cap)

    def scaled(self, factor: float) -> "Lattice":
        return Lattice(self.basis * factor, self.offset * factor)


def _zigzag(k: np.ndarray) -> np.ndarray:
    return np.where(k >= 0, 2 * k, -2 * k - 1)


@dataclass(frozen=True, eq=False)
class PerturbedLattice:
    """Lattice points moved by a deterministic per-point jitter in [-jitter, jitter]^n

    The jitter of the point with index k is a function of (seed, k) only, or of
    (seed, k mod period) when ``period`` is set, so materialization is
    independent of the window.
    """

    lattice: Lattice
    jitter: float
    seed: int = 42
    period: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.jitter < 0:
            raise ParameterRangeError(f"Jitter bound must be nonnegative, got {self.jitter}")
        if self.period is not None:
            period = tuple(int(p) for p in self.period)
            if len(period) != self.lattice.dim or min(period) < 1:
                raise ParameterRangeError(f"Invalid jitter period {self.period}")
            object.__setattr__(self, "period", period)

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def _jitter_for(self, K: np.ndarray) -> np.ndarray:
        if self.period is not None:
            table = np.random.default_rng(self.seed).uniform(
                -self.jitter, self.jitter, size=self.period + (self.dim,))
            residues = np.mod(K, self.period)
            return table[tuple(residues.T)]
        out = np.empty(K.shape, dtype=float)
        for row, k in enumerate(_zigzag(K)):
            rng = np.random.default_rng([self.seed, *map(int, k)])
            out[row] = rng.uniform(-self.jitter, self.jitter, size=self.dim)
        return out

    def points_in(self, window: Window, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
        K = self.lattice.indices_in(window.inflate(self.jitter), cap)
        points = self.lattice.offset + K @ self.lattice.basis.T + self._jitter_for(K)
        return _enforce_cap(points[window.contains(points)], cap)

    def scaled(self, factor: float) -> "PerturbedLattice":
        return replace(self, lattice=self.lattice.scaled(factor), jitter=self.jitter * factor)


def orthonormal_complement(unit: np.ndarray) -> np.ndarray:
    """Rows spanning the hyperplane orthogonal to ``unit``, built from coordinate axes"""
    n = unit.size
    rows: List[np.ndarray] = []
    for e in np.eye(n):
        v = e - (e @ unit) * unit
        for b in rows:
            v = v - (v @ b) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            rows.append(v / norm)
        if len(rows) == n - 1:
            break
    return np.array(rows).reshape(n - 1, n)


@dataclass(frozen=True, eq=False)
class HyperplaneLattice:
    """{x : x·t0 ∈ πZ}, each sheet discretized on a square grid of side ``sheet_step``"""

    normal: np.ndarray
    sheet_step: float = 0.5

    def __post_init__(self):
        t0 = as_vector(self.normal, what="normal")
        if not np.any(t0):
            raise ParameterRangeError("Hyperplane normal must be nonzero")
        if not self.sheet_step > 0:
            raise ParameterRangeError(f"Sheet step must be positive, got {self.sheet_step}")
        object.__setattr__(self, "normal", t0)

    @property
    def dim(self) -> int:
        return self.normal.size

    @property
    def sheet_gap(self) -> float:
        return math.pi / float(np.linalg.norm(self.normal))

    def sheet_indices(self, window: Window) -> np.ndarray:
        s = window.corners() @ self.normal
        return np.arange(math.ceil(s.min() / math.pi - 1e-12), math.floor(s.max() / math.pi + 1e-12) + 1)

    def points_in(self, window: Window, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
        t0 = self.normal
        nt2 = float(t0 @ t0)
        E = orthonormal_complement(t0 / math.sqrt(nt2))
        corners = window.corners()
        sheets = []
        total = 0
        for k in self.sheet_indices(window):
            origin = k * math.pi * t0 / nt2
            if E.shape[0] == 0:
                candidates = origin[None, :]
            else:
                proj = (corners - origin) @ E.T
                ranges = [np.arange(math.floor(lo / self.sheet_step), math.ceil(hi / self.sheet_step) + 1)
                          for lo, hi in zip(proj.min(axis=0), proj.max(axis=0))]
                M = _candidate_indices(ranges, cap)
                candidates = origin + (M * self.sheet_step) @ E
            inside = candidates[window.contains(candidates, tol=1e-12)]
            total += len(inside)
            if total > cap:
                raise ResourceCapError(total, cap)
            sheets.append(inside)
        return np.vstack(sheets) if sheets else np.zeros((0, self.dim))

    def scaled(self, factor: float) -> "HyperplaneLattice":
        return HyperplaneLattice(self.normal / factor, self.sheet_step * factor)


@dataclass(frozen=True, eq=False)
class ExplicitList:
    """A finite list of points"""

    points: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        if P.size == 0 or not np.all(np.isfinite(P)):
            raise EmptySetError("Explicit point list must be nonempty and finite")
        object.__setattr__(self, "points", P)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "ExplicitList":
        """One point per row, comma separated"""
        return cls(np.loadtxt(Path(path), delimiter=",", ndmin=2))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def points_in(self, window: Window, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
        return _enforce_cap(self.points[window.contains(self.points)], cap)

    def with_points(self, extra: np.ndarray) -> "ExplicitList":
        return ExplicitList(np.vstack([self.points, np.atleast_2d(extra)]))

    def scaled(self, factor: float) -> "ExplicitList":
        return ExplicitList(self.points * factor)


Generator = Union[Lattice, PerturbedLattice, HyperplaneLattice, ExplicitList]


@dataclass(frozen=True, eq=False)
class SamplingSet:
    """A discrete set Λ given by its generator; ``window_margin`` pads every materialization"""

    generator: Generator
    window_margin: float = 0.0

    @property
    def dim(self) -> int:
        return self.generator.dim

    def scaled(self, factor: float) -> "SamplingSet":
        return SamplingSet(self.generator.scaled(factor), self.window_margin * factor)


@dataclass(frozen=True)
class CoveringEstimate:
    """Grid estimate of the gauge covering radius with its upper certificate"""

    rho_estimate: float
    rho_upper_certificate: float
    probe_window: Window
    probes: int
    points: int
    worst_probe: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class DensityEstimate:
    r: float
    density: float
    min_count: int


@dataclass(frozen=True)
class NyquistVerdict:
    sampling_predicted: bool
    density: float
    threshold: float

    @property
    def margin(self) -> float:
        return self.density - self.threshold


def integer_lattice(dim: int, spacing: float = 1.0, offset: Optional[Sequence[float]] = None,
                    window_margin: float = 0.0) -> SamplingSet:
    """a·Z^n"""
    return SamplingSet(Lattice(spacing * np.eye(dim), offset), window_margin)


def hexagonal_lattice(spacing: float = 1.0, window_margin: float = 0.0) -> SamplingSet:
    """Triangular lattice in the plane with nearest-neighbour distance ``spacing``"""
    basis = spacing * np.array([[1.0, 0.5], [0.0, math.sqrt(3.0) / 2.0]])
    return SamplingSet(Lattice(basis), window_margin)


def periodic_lattice(period: float, divisions: Sequence[Sequence[int]]) -> Lattice:
    """A = period·B^{-1} for an integer matrix B, so the lattice contains period·Z^n"""
    B = np.atleast_2d(np.asarray(divisions, dtype=float))
    if not np.allclose(B, np.round(B)):
        raise ParameterRangeError("Divisions matrix must be integer")
    return Lattice(period * np.linalg.inv(B))


def materialize(L: SamplingSet, window: Window, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
    """Generator points inside ``window`` inflated by the set's margin"""
    window.check_dim(L.dim)
    points = L.generator.points_in(window.inflate(L.window_margin), cap)
    logger.debug("Sampling set materialized", kind=type(L.generator).__name__, points=len(points))
    return points


def _nearest_gauge(tree: cKDTree, points: np.ndarray, body: ConvexBody, X: np.ndarray,
                   c_body: float) -> np.ndarray:
    k = min(NEIGHBOURS, len(points))
    dist, idx = tree.query(X, k=k)
    dist = dist.reshape(len(X), -1)
    idx = idx.reshape(len(X), -1)
    diffs = (X[:, None, :] - points[idx]).reshape(-1, body.dim)
    best = polar_gauge_many(body, diffs).reshape(len(X), -1).min(axis=1)
    if body.kind is BodyKind.BALL or k == len(points):
        return best
    # beyond the k-th neighbour every gauge is at least c_K times the distance
    for i in np.flatnonzero(best > c_body * dist[:, -1]):
        candidates = tree.query_ball_point(X[i], best[i] / c_body * (1 + 1e-12) + 1e-12)
        if candidates:
            best[i] = min(best[i], float(polar_gauge_many(body, X[i] - points[candidates]).min()))
    return best


def covering_radius(L: SamplingSet, body: ConvexBody, window: Window, probe_step: float,
                    cap: int = DEFAULT_POINT_CAP) -> CoveringEstimate:
    """Certified bracket for the least rho with every probe within gauge rho of Λ

    Pure lattices are probed on one fundamental box; other sets on ``window``,
    which must sit inside the materialization window by the certified radius.
    """
    if body.dim != L.dim:
        raise DimensionMismatchError(L.dim, body.dim, "body")
    if not probe_step > 0:
        raise WindowError(f"Probe step must be positive, got {probe_step}")
    c_body = inradius(body)
    if c_body <= 0:
        raise InvalidBodyError("Covering radius needs a body with nonempty interior")
    C_body = lipschitz_constant(body)
    generator = L.generator

    if isinstance(generator, Lattice):
        probe_window = generator.fundamental_box()
        reach = C_body * generator.cell_diameter / c_body
        material_window = probe_window.inflate(reach + probe_step)
        points = generator.points_in(material_window, cap)
    else:
        window.check_dim(L.dim)
        probe_window = window
        material_window = window.inflate(L.window_margin)
        points = generator.points_in(material_window, cap)
    if len(points) == 0:
        raise EmptySetError("Sampling set has no points in the materialization window")

    tree = cKDTree(points)
    rho, worst, probes = -np.inf, probe_window.lower, 0
    for chunk in probe_window.grid_chunks(probe_step, cap):
        gauges = _nearest_gauge(tree, points, body, chunk, c_body)
        k = int(np.argmax(gauges))
        if gauges[k] > rho:
            rho, worst = float(gauges[k]), chunk[k].copy()
        probes += len(chunk)

    certificate = rho + probe_step * C_body * max(1.0, math.sqrt(L.dim) / 2.0)
    if not isinstance(generator, Lattice):
        needed = probe_window.inflate(certificate / c_body)
        if not material_window.contains_window(needed, tol=1e-12):
            raise WindowError(
                f"Probe window must sit {certificate / c_body:.4g} inside the materialization "
                f"window; margin is {L.window_margin:.4g}")

    logger.info("Covering radius computed", rho_estimate=rho, rho_certificate=certificate,
                probes=probes, points=len(points), body=body.describe())
    return CoveringEstimate(rho, float(certificate), probe_window, probes, len(points), worst)


def ball_volume(dim: int, r: float) -> float:
    """|rB| = r^n π^{n/2} / Γ(n/2 + 1)"""
    return float(r ** dim * math.pi ** (dim / 2.0) / gamma(dim / 2.0 + 1.0))


def lower_uniform_density(L: SamplingSet, radii: Sequence[float], center_samples: int = 256,
                          seed: int = 42, window: Optional[Window] = None,
                          cap: int = DEFAULT_POINT_CAP) -> List[DensityEstimate]:
    """min over sampled centers of Card(Λ ∩ (x + rB)) / |rB| for each r

    Centers are ``center_samples`` uniform draws plus a deterministic grid,
    all far enough from the window boundary that every ball fits. The
    default window is the cube of half-width twice the largest radius.
    """
    radii = sorted(float(r) for r in radii)
    if not radii or radii[0] <= 0:
        raise ParameterRangeError("Radii must be positive")
    window = window or Window.cube(2.0 * radii[-1], L.dim)
    window.check_dim(L.dim)
    try:
        center_region = window.shrink(radii[-1])
    except WindowError:
        raise WindowError(f"Window too small for radius {radii[-1]}")

    points = materialize(L, window, cap)
    if len(points) == 0:
        raise EmptySetError("Sampling set has no points in the density window")
    tree = cKDTree(points)
    rng = np.random.default_rng(seed)
    random_centers = rng.uniform(center_region.lower, center_region.upper, size=(center_samples, L.dim))
    axes = [np.linspace(lo, hi, DENSITY_GRID_PER_AXIS) for lo, hi in zip(center_region.lower, center_region.upper)]
    grid_centers = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    centers = np.vstack([random_centers, grid_centers])

    estimates = []
    for r in radii:
        counts = tree.query_ball_point(centers, r, return_length=True)
        lowest = int(np.min(counts))
        estimates.append(DensityEstimate(r, lowest / ball_volume(L.dim, r), lowest))
    logger.info("Lower uniform density estimated", radii=radii,
                densities=[e.density for e in estimates], centers=len(centers))
    return estimates


def nyquist_check_1d(sigma: float, density: float) -> NyquistVerdict:
    """Sampling predicted for S = [-sigma, sigma] iff D^- > sigma/π (strict)"""
    if not sigma > 0:
        raise ParameterRangeError(f"Band half-width must be positive, got {sigma}")
    threshold = 2.0 * sigma / (2.0 * math.pi)
    return NyquistVerdict(bool(density > threshold), float(density), threshold)


def set_to_dict(L: SamplingSet) -> Dict[str, Any]:
    g = L.generator
    if isinstance(g, Lattice):
        data: Dict[str, Any] = {"kind": "lattice", "basis": g.basis.tolist(), "offset": g.offset.tolist()}
    elif isinstance(g, PerturbedLattice):
        data = {"kind": "perturbed_lattice", "basis": g.lattice.basis.tolist(),
                "offset": g.lattice.offset.tolist(), "jitter": g.jitter, "seed": g.seed,
                "period": list(g.period) if g.period else None}
    elif isinstance(g, HyperplaneLattice):
        data = {"kind": "hyperplane_lattice", "normal": g.normal.tolist(), "sheet_step": g.sheet_step}
    else:
        data = {"kind": "explicit", "points": g.points.tolist()}
    data["window_margin"] = L.window_margin
    return data


def set_from_dict(data: Dict[str, Any]) -> SamplingSet:
    """Parse a set description; the inverse of ``set_to_dict`` plus shortcuts"""
    kind = data.get("kind")
    margin = float(data.get("window_margin", 0.0))
    if kind == "lattice":
        return SamplingSet(Lattice(data["basis"], data.get("offset")), margin)
    if kind == "integer_lattice":
        return integer_lattice(int(data["dim"]), float(data.get("spacing", 1.0)), data.get("offset"), margin)
    if kind == "hexagonal":
        return hexagonal_lattice(float(data.get("spacing", 1.0)), margin)
    if kind == "perturbed_lattice":
        lattice = Lattice(data["basis"], data.get("offset"))
        period = data.get("period")
        return SamplingSet(PerturbedLattice(lattice, float(data["jitter"]), int(data.get("seed", 42)),
                                            tuple(period) if period else None), margin)
    if kind == "hyperplane_lattice":
        return SamplingSet(HyperplaneLattice(data["normal"], float(data.get("sheet_step", 0.5))), margin)
    if kind == "explicit":
        if "csv" in data:
            return SamplingSet(ExplicitList.from_csv(data["csv"]), margin)
        return SamplingSet(ExplicitList(data["points"]), margin)
    raise ParameterRangeError(f"Unknown sampling set kind {kind!r} in field 'kind'")
