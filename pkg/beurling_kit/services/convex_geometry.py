"""
Convex Geometry Service
Symmetric convex bodies, support functions and polar-body gauges
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.spatial import ConvexHull

from ..errors import DimensionMismatchError, InvalidBodyError
from ..verification.reports import VerificationReport
from . import lp_solver

logger = structlog.get_logger(__name__)

DEFAULT_TOLERANCE = 1e-9
HOMOGENEITY_SCALARS = (-3.5, -1.0, 0.25, 2.0)


class BodyKind(str, Enum):
    BALL = "ball"
    BOX = "box"
    POLYTOPE = "polytope"
    SEGMENT = "segment"


def as_vector(x: Any, dim: Optional[int] = None, what: str = "vector") -> np.ndarray:
    """Coerce to a finite 1D float array, optionally checking its length"""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatchError(dim or 1, v.ndim, what)
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(dim, v.size, what)
    if not np.all(np.isfinite(v)):
        raise InvalidBodyError(f"Non-finite entries in {what}")
    return v


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Closed convex centrally symmetric body

    Balls and boxes are stored by radius and half-widths, polytopes by a
    vertex list closed under negation. Segments are the one degenerate kind;
    they exist for the sharpness construction only.
    """

    kind: BodyKind
    dim: int
    radius: Optional[float] = None
    half_widths: Optional[np.ndarray] = None
    vertices: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidBodyError(f"Body dimension must be positive, got {self.dim}")
        if self.kind is BodyKind.BALL:
            if self.radius is None or not np.isfinite(self.radius) or self.radius <= 0:
                raise InvalidBodyError(f"Ball radius must be positive, got {self.radius}")
        elif self.kind is BodyKind.BOX:
            h = as_vector(self.half_widths, self.dim, "half_widths")
            if np.any(h <= 0):
                raise InvalidBodyError(f"Box half-widths must be positive, got {h.tolist()}")
            object.__setattr__(self, "half_widths", h)
        elif self.kind in (BodyKind.POLYTOPE, BodyKind.SEGMENT):
            V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
            if V.ndim != 2 or V.shape[1] != self.dim:
                raise DimensionMismatchError(self.dim, V.shape[-1], "vertices")
            if not np.all(np.isfinite(V)):
                raise InvalidBodyError("Non-finite polytope vertex")
            _check_symmetric(V)
            if self.kind is BodyKind.POLYTOPE and np.linalg.matrix_rank(V) < self.dim:
                raise InvalidBodyError(
                    f"Polytope vertices span rank {np.linalg.matrix_rank(V)} < {self.dim}; "
                    "body has zero measure"
                )
            object.__setattr__(self, "vertices", V)

    @classmethod
    def ball(cls, dim: int, radius: float = 1.0) -> "ConvexBody":
        return cls(BodyKind.BALL, dim, radius=float(radius))

    @classmethod
    def box(cls, half_widths: Sequence[float]) -> "ConvexBody":
        h = as_vector(half_widths, what="half_widths")
        return cls(BodyKind.BOX, h.size, half_widths=h)

    @classmethod
    def interval(cls, sigma: float) -> "ConvexBody":
        """[-sigma, sigma] as a one-dimensional box"""
        return cls.box([sigma])

    @classmethod
    def polytope(cls, vertices: Sequence[Sequence[float]], symmetrize: bool = False) -> "ConvexBody":
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if symmetrize:
            V = np.vstack([V, -V])
        return cls(BodyKind.POLYTOPE, V.shape[1], vertices=V)

    @classmethod
    def segment(cls, endpoint: Sequence[float]) -> "ConvexBody":
        """The segment [-e, e]; degenerate, positive measure is not asserted"""
        e = as_vector(endpoint, what="endpoint")
        if not np.any(e):
            raise InvalidBodyError("Segment endpoint must be nonzero")
        return cls(BodyKind.SEGMENT, e.size, vertices=np.vstack([e, -e]))

    @property
    def degenerate(self) -> bool:
        return self.kind is BodyKind.SEGMENT

    def describe(self) -> str:
        if self.kind is BodyKind.BALL:
            return f"ball(dim={self.dim}, r={self.radius:g})"
        if self.kind is BodyKind.BOX:
            return f"box({', '.join(f'{h:g}' for h in self.half_widths)})"
        return f"{self.kind.value}(dim={self.dim}, vertices={len(self.vertices)})"


def _check_symmetric(V: np.ndarray, tol: float = 1e-12) -> None:
    scale = max(1.0, float(np.abs(V).max(initial=0.0)))
    for v in V:
        if np.min(np.abs(V + v).max(axis=1)) > tol * scale:
            raise InvalidBodyError(f"Vertex set is not symmetric: -{v.tolist()} missing")


def support_function_many(body: ConvexBody, X: np.ndarray) -> np.ndarray:
    """Row-wise h_K(x) = sup over t in K of t·x"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != body.dim:
        raise DimensionMismatchError(body.dim, X.shape[1])
    if body.kind is BodyKind.BALL:
        return body.radius * np.linalg.norm(X, axis=1)
    if body.kind is BodyKind.BOX:
        return np.abs(X) @ body.half_widths
    return np.max(X @ body.vertices.T, axis=1)


def support_function(body: ConvexBody, x: Any) -> float:
    """h_K(x); closed form for balls and boxes, vertex maximum otherwise"""
    x = as_vector(x, body.dim)
    return float(support_function_many(body, x[None, :])[0])


def polar_gauge_many(body: ConvexBody, X: np.ndarray) -> np.ndarray:
    """Row-wise gauge of the polar body; identical to the support function"""
    return support_function_many(body, X)


def polar_gauge(body: ConvexBody, x: Any) -> float:
    """||x|| in the gauge of K°, equal to h_K(x) for symmetric K"""
    return support_function(body, x)


def contains(body: ConvexBody, t: Any, tol: float = 1e-12) -> bool:
    """Membership t ∈ K up to ``tol``"""
    t = as_vector(t, body.dim, "frequency")
    if body.kind is BodyKind.BALL:
        return bool(np.linalg.norm(t) <= body.radius + tol)
    if body.kind is BodyKind.BOX:
        return bool(np.all(np.abs(t) <= body.half_widths + tol))
    norm = np.linalg.norm(t)
    if norm == 0.0:
        return True
    # t·u <= h_K(u) is necessary for u = t/|t|
    if norm > support_function(body, t / norm) + tol:
        return False
    if body.kind is BodyKind.SEGMENT:
        e = body.vertices[0]
        s = float(t @ e / (e @ e))
        return bool(np.linalg.norm(t - s * e) <= tol * max(1.0, norm) + tol and abs(s) <= 1 + tol)
    V = body.vertices
    k = V.shape[0]
    problem = lp_solver.LinearProgram(
        c=np.zeros(k),
        A_eq=np.vstack([V.T, np.ones((1, k))]),
        b_eq=np.concatenate([t, [1.0]]),
    )
    return lp_solver.solve(problem, tol=max(tol, 1e-11)).optimal


def lipschitz_constant(body: ConvexBody) -> float:
    """C_K = max of h_K over Euclidean unit vectors (circumradius)"""
    if body.kind is BodyKind.BALL:
        return float(body.radius)
    if body.kind is BodyKind.BOX:
        return float(np.linalg.norm(body.half_widths))
    return float(np.linalg.norm(body.vertices, axis=1).max())


def inradius(body: ConvexBody) -> float:
    """c_K = min of h_K over Euclidean unit vectors; zero for segments"""
    if body.kind is BodyKind.BALL:
        return float(body.radius)
    if body.kind is BodyKind.BOX:
        return float(body.half_widths.min())
    if body.kind is BodyKind.SEGMENT:
        return 0.0
    if body.dim == 1:
        return float(np.abs(body.vertices).max())
    hull = ConvexHull(body.vertices)
    # facets satisfy normal·x + offset <= 0 with unit normals
    return float(np.min(-hull.equations[:, -1]))


def scaled(body: ConvexBody, factor: float) -> ConvexBody:
    """aK for a > 0"""
    if not factor > 0:
        raise InvalidBodyError(f"Scale factor must be positive, got {factor}")
    if body.kind is BodyKind.BALL:
        return ConvexBody.ball(body.dim, body.radius * factor)
    if body.kind is BodyKind.BOX:
        return ConvexBody.box(body.half_widths * factor)
    return ConvexBody(body.kind, body.dim, vertices=body.vertices * factor)


def sign_vectors(dim: int) -> np.ndarray:
    """All 2^n vectors in {-1, 1}^n"""
    return np.array(list(itertools.product((-1.0, 1.0), repeat=dim)))


def inflate_by_cube(body: ConvexBody, half_side: float) -> ConvexBody:
    """A body containing K + half_side·[-1, 1]^n (exact for boxes and polytopes)"""
    if body.kind is BodyKind.BALL:
        return ConvexBody.ball(body.dim, body.radius + half_side * np.sqrt(body.dim))
    if body.kind is BodyKind.BOX:
        return ConvexBody.box(body.half_widths + half_side)
    shifts = half_side * sign_vectors(body.dim)
    V = (body.vertices[:, None, :] + shifts[None, :, :]).reshape(-1, body.dim)
    return ConvexBody.polytope(V)


def random_symmetric_polytope(dim: int, count: int, rng: np.random.Generator,
                              radius: float = 1.0) -> ConvexBody:
    """Symmetric polytope from ``count`` random vertex pairs with norms in [radius/2, radius]"""
    directions = rng.normal(size=(max(count, 1), dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    points = directions * rng.uniform(0.5 * radius, radius, size=(len(directions), 1))
    if np.linalg.matrix_rank(points) < dim:
        points = np.vstack([points, radius * np.eye(dim)])
    return ConvexBody.polytope(points, symmetrize=True)


def gauge_norm_axioms_check(body: ConvexBody, samples: Iterable[Tuple[Any, Any]],
                            tol: float = 1e-10) -> VerificationReport:
    """Homogeneity, symmetry and triangle inequality of ||·||_{K°} over sample pairs"""
    pairs = [(as_vector(x, body.dim), as_vector(y, body.dim)) for x, y in samples]
    X = np.array([p[0] for p in pairs]).reshape(-1, body.dim)
    Y = np.array([p[1] for p in pairs]).reshape(-1, body.dim)
    gx = polar_gauge_many(body, X)
    gy = polar_gauge_many(body, Y)

    homogeneity = 0.0
    for a in HOMOGENEITY_SCALARS:
        homogeneity = max(homogeneity, float(np.max(np.abs(polar_gauge_many(body, a * X) - abs(a) * gx),
                                                    initial=0.0)))
    symmetry = float(np.max(np.abs(polar_gauge_many(body, -X) - gx), initial=0.0))
    slack = gx + gy - polar_gauge_many(body, X + Y)
    triangle = float(np.max(np.maximum(-slack, 0.0), initial=0.0))
    worst = max(homogeneity, symmetry, triangle)

    logger.debug("Gauge axioms checked", body=body.describe(), pairs=len(pairs), worst=worst)
    return VerificationReport.build(
        "gauge_axioms",
        inputs={"body": body_to_dict(body), "pairs": len(pairs)},
        measured={
            "homogeneity_violation": homogeneity,
            "symmetry_violation": symmetry,
            "triangle_violation": triangle,
            "min_triangle_slack": float(np.min(slack, initial=np.inf)),
        },
        bound={"tolerance": tol},
        margin=tol - worst,
    )


def body_to_dict(body: ConvexBody) -> Dict[str, Any]:
    if body.kind is BodyKind.BALL:
        params: Dict[str, Any] = {"radius": body.radius}
    elif body.kind is BodyKind.BOX:
        params = {"half_widths": body.half_widths.tolist()}
    elif body.kind is BodyKind.SEGMENT:
        params = {"endpoint": body.vertices[0].tolist()}
    else:
        params = {"vertices": body.vertices.tolist()}
    return {"kind": body.kind.value, "dim": body.dim, "params": params}


def body_from_dict(data: Dict[str, Any]) -> ConvexBody:
    """Parse {"kind": "ball"|"box"|"polytope", "dim": n, "params": {...}}"""
    kind = data.get("kind")
    params = data.get("params") or {}
    dim = data.get("dim")
    try:
        kind = BodyKind(kind)
    except ValueError:
        raise InvalidBodyError(f"Unknown body kind {kind!r} in field 'kind'; "
                               "expected one of ball, box, polytope")

    def required(name: str) -> Any:
        if name not in params:
            raise InvalidBodyError(f"Missing field 'params.{name}' for {kind.value} body")
        return params[name]

    if kind is BodyKind.BALL:
        if dim is None:
            raise InvalidBodyError("Missing field 'dim' for ball body")
        body = ConvexBody.ball(int(dim), float(params.get("radius", 1.0)))
    elif kind is BodyKind.BOX:
        body = ConvexBody.box(required("half_widths"))
    elif kind is BodyKind.SEGMENT:
        body = ConvexBody.segment(required("endpoint"))
    else:
        body = ConvexBody.polytope(required("vertices"), symmetrize=bool(params.get("symmetrize", False)))
    if dim is not None and body.dim != int(dim):
        raise DimensionMismatchError(int(dim), body.dim, "body")
    return body
