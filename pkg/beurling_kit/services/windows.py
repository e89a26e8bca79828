"""
Axis-aligned windows
Bounded boxes on which infinite objects are materialized and grids swept
"""

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from ..errors import DimensionMismatchError, ResourceCapError, WindowError

DEFAULT_POINT_CAP = 5_000_000
GRID_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class Window:
    """Closed box [lower, upper] in R^n"""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise WindowError("Window bounds must be vectors of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise WindowError("Window bounds must be finite")
        if np.any(lower > upper):
            raise WindowError(f"Empty window: lower {lower.tolist()} exceeds upper {upper.tolist()}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, half_width: float, dim: int, center: Optional[Sequence[float]] = None) -> "Window":
        c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        return cls(c - half_width, c + half_width)

    @classmethod
    def from_list(cls, bounds: Sequence[Sequence[float]]) -> "Window":
        """Build from [[lo_1, hi_1], ..., [lo_n, hi_n]]"""
        pairs = np.asarray(bounds, dtype=float).reshape(-1, 2)
        return cls(pairs[:, 0], pairs[:, 1])

    def to_list(self) -> List[List[float]]:
        return [[float(lo), float(hi)] for lo, hi in zip(self.lower, self.upper)]

    @property
    def dim(self) -> int:
        return int(self.lower.size)

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    def inflate(self, margin: float) -> "Window":
        return Window(self.lower - margin, self.upper + margin)

    def shrink(self, margin: float) -> "Window":
        lower, upper = self.lower + margin, self.upper - margin
        if np.any(lower > upper):
            raise WindowError(f"Window too small to shrink by {margin}")
        return Window(lower, upper)

    def scaled(self, factor: float) -> "Window":
        return Window(self.lower * factor, self.upper * factor)

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points >= self.lower - tol) & (points <= self.upper + tol), axis=1)

    def contains_window(self, other: "Window", tol: float = 0.0) -> bool:
        return bool(np.all(other.lower >= self.lower - tol) and np.all(other.upper <= self.upper + tol))

    def corners(self) -> np.ndarray:
        grids = np.meshgrid(*[(lo, hi) for lo, hi in zip(self.lower, self.upper)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def check_dim(self, dim: int) -> None:
        if self.dim != dim:
            raise DimensionMismatchError(dim, self.dim, "window")

    def axis_nodes(self, step: float) -> List[np.ndarray]:
        """Per-axis nodes with spacing at most ``step``, endpoints included"""
        if not step > 0:
            raise WindowError(f"Grid step must be positive, got {step}")
        nodes = []
        for lo, hi in zip(self.lower, self.upper):
            count = int(math.ceil((hi - lo) / step - 1e-9))
            axis = lo + step * np.arange(count)
            nodes.append(np.append(axis[axis < hi], hi) if hi > lo else np.array([lo]))
        return nodes

    def node_count(self, step: float) -> int:
        return int(np.prod([axis.size for axis in self.axis_nodes(step)], dtype=object))

    def grid_chunks(self, step: float, cap: int = DEFAULT_POINT_CAP,
                    chunk: int = GRID_CHUNK) -> Iterator[np.ndarray]:
        """Yield the grid nodes in row blocks; raises before allocating if over cap"""
        axes = self.axis_nodes(step)
        shape = tuple(axis.size for axis in axes)
        total = int(np.prod(shape, dtype=object))
        if total > cap:
            raise ResourceCapError(total, cap, "grid nodes")
        for start in range(0, total, chunk):
            flat = np.arange(start, min(start + chunk, total))
            index = np.unravel_index(flat, shape)
            yield np.stack([axes[i][index[i]] for i in range(len(axes))], axis=1)


def default_window(dim: int) -> Window:
    """[-20, 20]^n up to the plane, [-8, 8]^n above"""
    return Window.cube(20.0 if dim <= 2 else 8.0, dim)
