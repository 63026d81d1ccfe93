"""Safety verdicts and simulation cross-checks for reach results."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError
from .geometry import CONTAIN_TOL, PolyUnion, Polytope, contains_points, intersect, vertices
from .lp import lp_feasible
from .system import PwlSystem, ReachResult, SwitchingSignal, eval_step

SAFE = "Safe"
UNCERTAIN = "Uncertain"


@dataclass(frozen=True)
class SafetySpec:
    """Unsafe region, i.e. the complement of the safe set."""

    unsafe: PolyUnion
    label: str = "unsafe"

    def __post_init__(self):
        u = self.unsafe
        if isinstance(u, Polytope):
            u = PolyUnion([u])
        elif not isinstance(u, PolyUnion):
            u = PolyUnion(u)
        if len(u) == 0:
            raise ValueError("unsafe set is empty")
        object.__setattr__(self, "unsafe", u)

    @property
    def dim(self) -> int:
        return self.unsafe.dim


@dataclass(frozen=True)
class SafetyVerdict:
    status: str
    first_violation_step: int | None = None
    witness: np.ndarray | None = None
    conclusive: bool = True
    horizon: int = 0

    @property
    def safe(self) -> bool:
        return self.status == SAFE


def check_safety(result: ReachResult, spec: SafetySpec) -> SafetyVerdict:
    """Safe iff no step's reach set meets the unsafe region.

    Steps are scanned in order, so an ``Uncertain`` verdict carries the first
    offending step and an LP witness lying in both sets. ``Safe`` is sound in
    every mode; ``Uncertain`` is flagged inconclusive for over-approximate
    (hull or decoupled) results.
    """
    dim = result.per_step[0].dim
    if dim is not None and spec.dim != dim:
        raise DimensionError(f"unsafe set has dimension {spec.dim}, reach sets have {dim}")
    exact = result.mode == "exact" and result.coupling == "coupled"
    for h, X in enumerate(result.per_step):
        for part in X:
            for bad in spec.unsafe:
                both = intersect(part, bad)
                out = lp_feasible(both.H, both.b)
                if out.feasible:
                    return SafetyVerdict(UNCERTAIN, h, out.point, conclusive=exact, horizon=result.horizon)
    return SafetyVerdict(SAFE, horizon=result.horizon)


def grid_points(X0, step: float, style: str = "inclusive", tau: float = CONTAIN_TOL) -> np.ndarray:
    """Axis-aligned grid over the bounding box of ``X0``, filtered by membership.

    ``inclusive`` puts points on both box edges (21 per axis for [-1, 1] at
    0.1); ``centered`` puts them at cell midpoints (20 per axis).
    """
    if step <= 0:
        raise ValueError("grid step must be positive")
    if style not in ("inclusive", "centered"):
        raise ValueError(f"grid style must be 'inclusive' or 'centered', got {style!r}")
    parts = [X0] if isinstance(X0, Polytope) else list(X0)
    V = np.vstack([vertices(p) for p in parts])
    lo, hi = V.min(axis=0), V.max(axis=0)
    axes = []
    for a, b in zip(lo, hi):
        width = (b - a) / step
        if style == "inclusive":
            n = int(np.floor(width + 1e-9)) + 1
            axes.append(a + step * np.arange(n))
        else:
            n = max(1, int(np.round(width)))
            axes.append(a + step * (np.arange(n) + 0.5) if width > 1e-12 else np.array([a]))
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    keep = np.zeros(len(G), dtype=bool)
    for p in parts:
        keep |= contains_points(p, G, tau)
    return G[keep]


def simulate(sys: PwlSystem, sig: SwitchingSignal, net, x0, k: int) -> np.ndarray:
    """Trajectories for a batch of initial states; shape ``(n, k + 1, n_x)``."""
    X = np.atleast_2d(np.asarray(x0, dtype=float))
    out = [X]
    for h in range(k):
        X = eval_step(sys, sig(h), net, X)
        out.append(X)
    return np.stack(out, axis=1)


def simulate_grid(sys: PwlSystem, sig: SwitchingSignal, net, X0, step: float, k: int,
                  style: str = "inclusive") -> list[np.ndarray]:
    """One trajectory (``k + 1`` states) per grid point of ``X0``."""
    T = simulate(sys, sig, net, grid_points(X0, step, style), k)
    return list(T)


@dataclass
class ContainmentReport:
    n_trajectories: int
    misses: list = field(default_factory=list)
    tau: float = 1e-6

    @property
    def total_misses(self) -> int:
        return int(sum(self.misses))

    @property
    def ok(self) -> bool:
        return self.total_misses == 0

    def summary(self) -> str:
        states = self.n_trajectories * len(self.misses)
        return f"{self.total_misses} misses out of {states} states ({self.n_trajectories} trajectories)"


def validate_containment(trajs, result: ReachResult, tau: float = 1e-6) -> ContainmentReport:
    """Count trajectory states outside every part of the matching step's reach set."""
    T = np.asarray(trajs, dtype=float)
    if T.ndim != 3:
        raise DimensionError("trajectories must have shape (n, k + 1, n_x)")
    if T.shape[1] != len(result.per_step):
        raise DimensionError(f"trajectories have {T.shape[1]} states, result has {len(result.per_step)} steps")
    misses = []
    for h, X in enumerate(result.per_step):
        inside = np.zeros(T.shape[0], dtype=bool)
        for part in X:
            inside |= contains_points(part, T[:, h, :], tau)
        misses.append(int(np.sum(~inside)))
    return ContainmentReport(T.shape[0], misses, tau)
