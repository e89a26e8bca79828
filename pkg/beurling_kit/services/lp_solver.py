"""
Dense Simplex Solver
Two-phase tableau simplex with Bland's rule for desk-scale linear programs
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import structlog

from ..errors import LPError

logger = structlog.get_logger(__name__)


class LPStatus(str, Enum):
    """Terminal states of the simplex method"""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LinearProgram:
    """maximize c·x subject to A_ub x <= b_ub and A_eq x = b_eq

    Variables are nonnegative unless ``free`` is set, in which case every
    variable is unrestricted in sign.
    """

    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    free: bool = False


@dataclass(frozen=True)
class LPResult:
    """Outcome of one solve"""

    status: LPStatus
    x: Optional[np.ndarray]
    objective: float
    iterations: int
    basis: Optional[np.ndarray] = None

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _rows(matrix: Optional[np.ndarray], rhs: Optional[np.ndarray], n: int,
          name: str) -> Tuple[np.ndarray, np.ndarray]:
    if matrix is None:
        return np.zeros((0, n)), np.zeros(0)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    if matrix.shape[1] != n:
        raise LPError(f"{name} has {matrix.shape[1]} columns, objective has {n}")
    if matrix.shape[0] != rhs.size:
        raise LPError(f"{name} has {matrix.shape[0]} rows but {rhs.size} right-hand sides")
    return matrix, rhs


class DenseSimplexSolver:
    """Two-phase dense tableau simplex

    The tableau keeps constraint rows on top and the reduced-cost row last.
    Entering and leaving variables follow Bland's rule, so the method cannot
    cycle on degenerate vertices.
    """

    def __init__(self, tol: float = 1e-9, max_iterations: int = 50_000):
        self.tol = tol
        self.max_iterations = max_iterations

    def solve(self, problem: LinearProgram) -> LPResult:
        c = np.asarray(problem.c, dtype=float).reshape(-1)
        n = c.size
        A_ub, b_ub = _rows(problem.A_ub, problem.b_ub, n, "A_ub")
        A_eq, b_eq = _rows(problem.A_eq, problem.b_eq, n, "A_eq")

        if problem.free:
            A_ub = np.hstack([A_ub, -A_ub])
            A_eq = np.hstack([A_eq, -A_eq])
            c = np.concatenate([c, -c])
        nx = c.size
        m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
        m = m_ub + m_eq

        A = np.vstack([A_ub, A_eq])
        b = np.concatenate([b_ub, b_eq])
        slacks = np.zeros((m, m_ub))
        slacks[:m_ub, :m_ub] = np.eye(m_ub)
        flipped = b < 0
        A[flipped] *= -1.0
        slacks[flipped] *= -1.0
        b[flipped] *= -1.0

        needs_artificial = [i for i in range(m) if i >= m_ub or flipped[i]]
        art_start = nx + m_ub
        n_cols = art_start + len(needs_artificial)

        T = np.zeros((m + 1, n_cols + 1))
        T[:m, :nx] = A
        T[:m, nx:art_start] = slacks
        T[:m, -1] = b
        basis = np.empty(m, dtype=int)
        for i in range(m_ub):
            basis[i] = nx + i
        for k, i in enumerate(needs_artificial):
            T[i, art_start + k] = 1.0
            basis[i] = art_start + k

        iterations = 0
        if needs_artificial:
            T[-1, art_start:n_cols] = 1.0
            for i in needs_artificial:
                T[-1] -= T[i]
            status, steps = self._run(T, basis)
            iterations += steps
            if status is LPStatus.ITERATION_LIMIT:
                return LPResult(status, None, float("nan"), iterations)
            scale = max(1.0, float(np.abs(b).max(initial=0.0)))
            if T[-1, -1] < -self.tol * scale:
                logger.debug("Phase one found no feasible point", residual=float(-T[-1, -1]))
                return LPResult(LPStatus.INFEASIBLE, None, float("nan"), iterations)

            redundant = []
            for i in range(m):
                if basis[i] < art_start:
                    continue
                candidates = np.flatnonzero(np.abs(T[i, :art_start]) > self.tol)
                if candidates.size:
                    self._pivot(T, basis, i, int(candidates[0]))
                else:
                    redundant.append(i)
            if redundant:
                keep = np.setdiff1d(np.arange(m), redundant)
                T = np.vstack([T[keep], T[-1:]])
                basis = basis[keep]
            T = np.hstack([T[:, :art_start], T[:, -1:]])

        T[-1, :] = 0.0
        T[-1, :nx] = -c
        for i, j in enumerate(basis):
            if T[-1, j] != 0.0:
                T[-1] -= T[-1, j] * T[i]

        status, steps = self._run(T, basis)
        iterations += steps
        if status is not LPStatus.OPTIMAL:
            logger.debug("Simplex stopped", status=status.value, iterations=iterations)
            return LPResult(status, None, float("nan"), iterations)

        x = np.zeros(nx)
        for i, j in enumerate(basis):
            if j < nx:
                x[j] = T[i, -1]
        x = np.maximum(x, 0.0)
        if problem.free:
            x = x[: nx // 2] - x[nx // 2:]
        objective = float(np.asarray(problem.c, dtype=float) @ x)
        structural = basis[basis < nx]
        if problem.free:
            structural = np.unique(structural % (nx // 2))
        return LPResult(LPStatus.OPTIMAL, x, objective, iterations, np.sort(structural))

    def _run(self, T: np.ndarray, basis: np.ndarray) -> Tuple[LPStatus, int]:
        for step in range(self.max_iterations):
            entering = np.flatnonzero(T[-1, :-1] < -self.tol)
            if entering.size == 0:
                return LPStatus.OPTIMAL, step
            col = int(entering[0])
            column = T[:-1, col]
            positive = column > self.tol
            if not positive.any():
                return LPStatus.UNBOUNDED, step
            ratios = np.full(column.shape, np.inf)
            ratios[positive] = T[:-1, -1][positive] / column[positive]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + self.tol * max(1.0, abs(best)))
            row = int(ties[np.argmin(basis[ties])])
            self._pivot(T, basis, row, col)
        return LPStatus.ITERATION_LIMIT, self.max_iterations

    @staticmethod
    def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        basis[row] = col


def solve(problem: LinearProgram, tol: float = 1e-9, max_iterations: int = 50_000) -> LPResult:
    """Solve a linear program with the dense two-phase simplex"""
    result = DenseSimplexSolver(tol=tol, max_iterations=max_iterations).solve(problem)
    logger.debug("Linear program solved", status=result.status.value,
                 iterations=result.iterations, objective=result.objective)
    return result
