"""Dense two-phase simplex for small inequality-form linear programs.

Every polytope predicate in the package reduces to one of two calls:

* :func:`lp_feasible` -- is ``{x | H x <= b}`` non-empty?
* :func:`lp_optimize` -- min/max ``c . x`` over that set.

Variables are free; internally ``x = x_plus - x_minus`` with a slack per
row. Pivoting follows Bland's rule, so the method terminates on degenerate
problems; a hard iteration cap of ``10 (m + n)^2`` turns any numerical
cycling into a :class:`~relureach.exceptions.SolverError`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, SolverError

LP_TOL = 1e-9
_PIVOT_EPS = 1e-11


class LpStatus(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpOutcome:
    """Result of an LP call.

    ``point`` is the feasibility witness or the optimizer, ``value`` the
    optimal objective. For infeasible problems ``certificate`` holds a Farkas
    vector ``y >= 0`` with ``y^T H = 0`` and ``y^T b < 0``.
    """

    status: LpStatus
    point: np.ndarray | None = None
    value: float | None = None
    certificate: np.ndarray | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return self.status in (LpStatus.FEASIBLE, LpStatus.OPTIMAL, LpStatus.UNBOUNDED)


def as_matrix(H, name="H") -> np.ndarray:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValueError(f"{name} contains non-finite entries")
    return H


def as_vector(b, name="b") -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.ndim == 0:
        b = b.reshape(1)
    if b.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError(f"{name} contains non-finite entries")
    return b


def _check(H, b):
    H = as_matrix(H)
    b = as_vector(b)
    if H.shape[0] != b.shape[0]:
        raise DimensionError(f"H has {H.shape[0]} rows but b has length {b.shape[0]}")
    if H.shape[1] < 1:
        raise DimensionError("at least one variable is required")
    return H, b


class _Tableau:
    """Simplex tableau ``[A | rhs]`` with an objective row appended."""

    def __init__(self, A, rhs, basis, cap):
        self.T = np.hstack([A, rhs[:, None]])
        self.basis = list(basis)
        self.cap = cap
        self.pivots = 0

    @property
    def m(self):
        return self.T.shape[0]

    def set_objective(self, c):
        cb = c[self.basis]
        body = self.T[:, :-1]
        red = c - cb @ body
        self.obj = np.append(red, -cb @ self.T[:, -1])

    def pivot(self, row, col):
        self.pivots += 1
        if self.pivots > self.cap:
            raise SolverError(f"simplex exceeded iteration cap of {self.cap} pivots")
        T = self.T
        T[row] /= T[row, col]
        for i in range(self.m):
            if i != row and T[i, col] != 0.0:
                T[i] -= T[i, col] * T[row]
        if self.obj[col] != 0.0:
            self.obj -= self.obj[col] * T[row]
        self.basis[row] = col

    def run(self, active_cols):
        """Minimize the current objective; returns False when unbounded."""
        T = self.T
        while True:
            enter = -1
            for j in active_cols:
                if self.obj[j] < -_PIVOT_EPS:
                    enter = j
                    break
            if enter < 0:
                return True
            column = T[:, enter]
            rows = np.nonzero(column > _PIVOT_EPS)[0]
            if rows.size == 0:
                return False
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-14 * max(1.0, abs(best))]
            leave = min(ties, key=lambda r: self.basis[r])
            self.pivot(leave, enter)

    def solution(self, ncols):
        z = np.zeros(ncols)
        for i, j in enumerate(self.basis):
            if j < ncols:
                z[j] = self.T[i, -1]
        return z


def _solve(c, H, b):
    """Shared two-phase driver. ``c=None`` stops after phase 1."""
    m, n = H.shape
    cap = 10 * (m + n) ** 2
    sign = np.where(b < 0, -1.0, 1.0)
    flipped = np.nonzero(sign < 0)[0]
    k = flipped.size
    nx = 2 * n + m  # x_plus, x_minus, slack
    A = np.zeros((m, nx + k))
    A[:, :n] = H * sign[:, None]
    A[:, n:2 * n] = -A[:, :n]
    A[:, 2 * n:nx] = np.diag(sign)
    for t, i in enumerate(flipped):
        A[i, nx + t] = 1.0
    rhs = b * sign
    basis = [2 * n + i if sign[i] > 0 else nx + int(np.searchsorted(flipped, i)) for i in range(m)]

    tab = _Tableau(A.copy(), rhs.copy(), basis, cap)
    if k:
        c1 = np.zeros(nx + k)
        c1[nx:] = 1.0
        tab.set_objective(c1)
        tab.run(range(nx + k))
        infeas = -tab.obj[-1]
        if infeas > LP_TOL:
            B = A[:, tab.basis]
            pi = np.linalg.lstsq(B.T, c1[tab.basis], rcond=None)[0]
            return LpOutcome(LpStatus.INFEASIBLE, certificate=np.maximum(-sign * pi, 0.0))
        # drive zero-level artificials out of the basis, drop redundant rows
        keep = []
        for i in range(tab.m):
            if tab.basis[i] >= nx:
                cand = np.nonzero(np.abs(tab.T[i, :nx]) > 1e-9)[0]
                if cand.size == 0:
                    continue
                tab.pivot(i, int(cand[0]))
            keep.append(i)
        tab.T = np.delete(tab.T[keep], np.s_[nx:nx + k], axis=1)
        tab.basis = [tab.basis[i] for i in keep]

    z = tab.solution(nx)
    x = z[:n] - z[n:2 * n]
    if c is None:
        return LpOutcome(LpStatus.FEASIBLE, point=x)

    c2 = np.zeros(nx)
    c2[:n] = c
    c2[n:2 * n] = -c
    tab.set_objective(c2)
    if not tab.run(range(nx)):
        return LpOutcome(LpStatus.UNBOUNDED, point=x)
    z = tab.solution(nx)
    x = z[:n] - z[n:2 * n]
    return LpOutcome(LpStatus.OPTIMAL, point=x, value=float(c @ x))


def lp_feasible(H, b) -> LpOutcome:
    """Decide whether ``{x | H x <= b}`` is non-empty.

    >>> lp_feasible([[1.0], [-1.0]], [1.0, 1.0]).status
    <LpStatus.FEASIBLE: 'feasible'>
    >>> lp_feasible([[1.0], [-1.0]], [-2.0, 1.0]).status
    <LpStatus.INFEASIBLE: 'infeasible'>
    """
    H, b = _check(H, b)
    if H.shape[0] == 0:
        return LpOutcome(LpStatus.FEASIBLE, point=np.zeros(H.shape[1]))
    return _solve(None, H, b)


def lp_optimize(c, H, b, sense: str = "min") -> LpOutcome:
    """Optimize ``c . x`` subject to ``H x <= b``; ``sense`` is ``"min"`` or ``"max"``."""
    H, b = _check(H, b)
    c = as_vector(c, "c")
    if c.shape[0] != H.shape[1]:
        raise DimensionError(f"c has length {c.shape[0]}, expected {H.shape[1]}")
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    flip = -1.0 if sense == "max" else 1.0
    if H.shape[0] == 0:
        if np.any(c != 0):
            return LpOutcome(LpStatus.UNBOUNDED, point=np.zeros(H.shape[1]))
        return LpOutcome(LpStatus.OPTIMAL, point=np.zeros(H.shape[1]), value=0.0)
    out = _solve(flip * c, H, b)
    if out.status is LpStatus.OPTIMAL:
        return LpOutcome(LpStatus.OPTIMAL, point=out.point, value=float(c @ out.point))
    return out
