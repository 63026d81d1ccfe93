"""Closed-loop reachable sets of switched linear systems with a ReLU controller.

The plant is ``x(k+1) = A_s x(k) + B_s u(k)`` with ``s = sigma(k)`` picked by
a switching signal, and ``u(k) = g(x(k))`` is a :class:`ReluNetwork`. On each
affine piece of ``g`` the closed loop is the affine map
``x -> (A + B C) x + B d``, so one step maps a union of polytopes to a union
of polytopes exactly. Hull mode replaces each step's union by its convex
hull, trading exactness for a single polytope per step.

Two successor rules are available. ``coupled`` keeps the functional link
between ``x`` and ``g(x)`` and is exact. ``decoupled`` lets ``x`` range over
``X_k`` and ``u`` over the controller's output set ``G_k`` independently,
giving ``A X_k (+) B G_k`` (Minkowski sum). It is looser; hull mode uses it
by default, pass ``coupling="coupled"`` for the tighter hull.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DimensionError
from .geometry import (PolyUnion, Polytope, affine_image, hull_of_union, minkowski_sum,
                       remove_redundant)
from .lp import as_matrix
from .network import ReluNetwork, eval_network, network_reach, output_set

MODES = ("exact", "hull")
COUPLINGS = ("coupled", "decoupled")
DEFAULT_COUPLING = {"exact": "coupled", "hull": "decoupled"}


class PwlSystem:
    """Modes ``(A_i, B_i)``, numbered from 1 as in the usual notation."""

    def __init__(self, modes: Sequence[tuple]):
        if len(modes) < 1:
            raise ValueError("N >= 1 required: a system needs at least one mode")
        parsed = []
        for i, (A, B) in enumerate(modes):
            A = as_matrix(A, f"modes[{i}].A")
            B = as_matrix(B, f"modes[{i}].B")
            parsed.append((A, B))
        n_x, n_u = parsed[0][0].shape[0], parsed[0][1].shape[1]
        for i, (A, B) in enumerate(parsed):
            if A.shape != (n_x, n_x):
                raise DimensionError(f"modes[{i}].A has shape {A.shape}, expected ({n_x}, {n_x})")
            if B.shape != (n_x, n_u):
                raise DimensionError(f"modes[{i}].B has shape {B.shape}, expected ({n_x}, {n_u})")
        self.modes = tuple(parsed)
        self.n_x = n_x
        self.n_u = n_u

    def __len__(self):
        return len(self.modes)

    def mode(self, mode_id: int):
        if not 1 <= mode_id <= len(self.modes):
            raise ValueError(f"mode id {mode_id} outside 1..{len(self.modes)}")
        return self.modes[mode_id - 1]


@dataclass(frozen=True)
class SwitchingSignal:
    """Mode schedule.

    ``periodic`` cycles through ``order`` starting at mode ``sigma0``;
    ``explicit`` reads ``sequence[h]`` directly (``sigma0`` must then match
    ``sequence[0]`` if given).
    """

    kind: str
    modes: tuple
    sigma0: int | None = None

    def __post_init__(self):
        if self.kind not in ("periodic", "explicit"):
            raise ValueError(f"switching kind must be 'periodic' or 'explicit', got {self.kind!r}")
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if not self.modes:
            raise ValueError("switching signal needs at least one mode id")
        if self.kind == "periodic":
            s0 = self.modes[0] if self.sigma0 is None else int(self.sigma0)
            if s0 not in self.modes:
                raise ValueError(f"sigma0={s0} does not appear in the periodic order {list(self.modes)}")
            object.__setattr__(self, "sigma0", s0)
        else:
            if self.sigma0 is not None and int(self.sigma0) != self.modes[0]:
                raise ValueError("sigma0 disagrees with the first entry of the explicit sequence")
            object.__setattr__(self, "sigma0", self.modes[0])

    @classmethod
    def periodic(cls, order, sigma0=None):
        return cls("periodic", tuple(order), sigma0)

    @classmethod
    def explicit(cls, sequence):
        return cls("explicit", tuple(sequence))

    def __call__(self, h: int) -> int:
        if self.kind == "periodic":
            start = self.modes.index(self.sigma0)
            return self.modes[(start + h) % len(self.modes)]
        if h >= len(self.modes):
            raise ValueError(f"explicit switching sequence has no entry for step {h}")
        return self.modes[h]

    def validate(self, n_modes: int, horizon: int | None = None):
        bad = [m for m in self.modes if not 1 <= m <= n_modes]
        if bad:
            raise ValueError(f"switching mode ids {bad} outside 1..{n_modes}")
        if self.kind == "explicit" and horizon is not None and len(self.modes) < horizon:
            raise ValueError(f"explicit sequence has {len(self.modes)} entries, horizon {horizon} needs {horizon}")


@dataclass
class ReachResult:
    """Per-step reach sets ``X_0 .. X_k`` and their union over ``[0, k]``."""

    per_step: list
    mode: str
    mode_ids: list
    piece_counts: list = field(default_factory=list)
    timings: list = field(default_factory=list, compare=False)
    coupling: str = "coupled"

    @property
    def horizon(self) -> int:
        return len(self.per_step) - 1

    @property
    def cumulative(self) -> PolyUnion:
        # step order, not re-sorted: the prefix for [0, h] is a prefix of [0, h+1]
        parts = [p for u in self.per_step for p in u]
        return PolyUnion(parts, dim=self.per_step[0].dim, sort=False)


def eval_step(sys: PwlSystem, mode_id: int, net: ReluNetwork, x) -> np.ndarray:
    """One closed-loop step ``A x + B g(x)``; ``x`` may be a batch of rows."""
    A, B = sys.mode(mode_id)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != sys.n_x:
        raise DimensionError(f"state has dimension {x.shape[-1]}, system has {sys.n_x}")
    return x @ A.T + eval_network(net, x) @ B.T


def _check_dims(sys: PwlSystem, net: ReluNetwork):
    if net.n_in != sys.n_x:
        raise DimensionError(f"network input dimension {net.n_in} != state dimension {sys.n_x}")
    if net.n_out != sys.n_u:
        raise DimensionError(f"network output dimension {net.n_out} != input dimension {sys.n_u}")


def _resolve(mode, coupling):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    coupling = coupling or DEFAULT_COUPLING[mode]
    if coupling not in COUPLINGS:
        raise ValueError(f"coupling must be one of {COUPLINGS}, got {coupling!r}")
    return coupling


def closed_loop_step(X, mode_id: int, sys: PwlSystem, net: ReluNetwork, mode: str = "exact",
                     piece_cap: int | None = None, coupling: str | None = None) -> PolyUnion:
    """Successor set of ``X`` under mode ``mode_id``.

    With ``coupling="coupled"`` every affine piece ``(R, C, d)`` of the
    controller on ``X`` contributes the image of ``R`` under
    ``(A + B C) x + B d``. With ``"decoupled"`` each part of ``X`` is mapped
    by ``A`` and summed with ``B`` times each part of the controller output
    set. Exact mode returns the union; hull mode its convex hull.
    """
    coupling = _resolve(mode, coupling)
    _check_dims(sys, net)
    A, B = sys.mode(mode_id)
    X = [X] if isinstance(X, Polytope) else list(X)
    pieces = network_reach(X, net, piece_cap=piece_cap)
    if coupling == "coupled":
        images = [affine_image(p.domain, A + B @ p.C, B @ p.d) for p in pieces]
    else:
        G = output_set(pieces)
        if mode == "hull":
            G = [hull_of_union(G)]
        nx = sys.n_x
        images = [minkowski_sum(affine_image(P, A, np.zeros(nx)), affine_image(Gj, B, np.zeros(nx)))
                  for P in X for Gj in G]
    if mode == "hull":
        return PolyUnion([hull_of_union(images)])
    return PolyUnion(remove_redundant(P) for P in images)


def reach_interval(sys: PwlSystem, sig: SwitchingSignal, net: ReluNetwork, X0, k: int,
                   mode: str = "hull", piece_cap: int | None = None,
                   coupling: str | None = None) -> ReachResult:
    """Reach sets for steps ``0..k`` under the switching signal ``sig``.

    ``coupling`` defaults to ``"coupled"`` in exact mode and ``"decoupled"``
    in hull mode; see the module docstring.
    """
    if k < 0:
        raise ValueError("horizon must be non-negative")
    coupling = _resolve(mode, coupling)
    _check_dims(sys, net)
    sig.validate(len(sys), k)
    X = PolyUnion([X0] if isinstance(X0, Polytope) else X0)
    if X.dim is not None and X.dim != sys.n_x:
        raise DimensionError(f"initial set has dimension {X.dim}, system has {sys.n_x}")
    if mode == "hull" and len(X) > 1:
        X = PolyUnion([hull_of_union(X)])
    per_step = [X]
    mode_ids = []
    counts = [len(X)]
    timings = [0.0]
    for h in range(k):
        sid = sig(h)
        t0 = time.perf_counter()
        X = closed_loop_step(X, sid, sys, net, mode, piece_cap=piece_cap, coupling=coupling)
        timings.append(time.perf_counter() - t0)
        per_step.append(X)
        mode_ids.append(sid)
        counts.append(len(X))
    return ReachResult(per_step, mode, mode_ids, counts, timings, coupling=coupling)
