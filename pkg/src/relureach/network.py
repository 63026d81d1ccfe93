"""Exact output sets of feed-forward ReLU networks over unions of polytopes.

The network is piecewise affine: fixing which ReLUs are active turns every
layer into ``y = Q (W v + theta)`` with ``Q`` the 0/1 diagonal of active
neurons. :func:`network_reach` enumerates the activation patterns that
actually occur on the input set and returns one :class:`AffinePiece` per
pattern region, each a domain polytope in *input* coordinates together with
the affine map the network computes there. Keeping the domain in input
coordinates is what lets the closed-loop step use the coupled dynamics
``A x + B g(x)`` rather than treating ``x`` and ``g(x)`` independently.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DimensionError, PieceCapExceeded
from .geometry import GEO_TOL, PolyUnion, Polytope, affine_image
from .lp import LpStatus, as_matrix, as_vector, lp_optimize

DEFAULT_PIECE_CAP = 10**6
ACTIVATIONS = ("relu", "linear")


def default_piece_cap() -> int:
    """Piece cap from ``NNREACH_PIECE_CAP`` or the built-in default."""
    raw = os.environ.get("NNREACH_PIECE_CAP")
    return int(raw) if raw else DEFAULT_PIECE_CAP


@dataclass(frozen=True)
class Layer:
    W: np.ndarray
    theta: np.ndarray
    kind: str = "relu"

    def __post_init__(self):
        W = as_matrix(self.W, "W")
        theta = as_vector(self.theta, "theta")
        if W.shape[0] != theta.shape[0]:
            raise DimensionError(f"W has {W.shape[0]} rows but theta has length {theta.shape[0]}")
        if self.kind not in ACTIVATIONS:
            raise ValueError(f"unknown activation kind {self.kind!r}; expected one of {ACTIVATIONS}")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "theta", theta)

    @property
    def n_in(self) -> int:
        return self.W.shape[1]

    @property
    def n_out(self) -> int:
        return self.W.shape[0]

    def __call__(self, v):
        z = v @ self.W.T + self.theta
        return np.maximum(z, 0.0) if self.kind == "relu" else z


class ReluNetwork:
    """Feed-forward network; each layer is ReLU or linear."""

    def __init__(self, layers: Sequence[Layer]):
        layers = tuple(layers)
        if not layers:
            raise ValueError("a network needs at least one layer")
        for i in range(1, len(layers)):
            if layers[i].n_in != layers[i - 1].n_out:
                raise DimensionError(
                    f"layer {i} expects {layers[i].n_in} inputs but layer {i - 1} has {layers[i - 1].n_out} outputs"
                )
        self.layers = layers

    @property
    def n_in(self) -> int:
        return self.layers[0].n_in

    @property
    def n_out(self) -> int:
        return self.layers[-1].n_out

    def __call__(self, x):
        return eval_network(self, x)

    def __repr__(self):
        widths = [self.n_in] + [l.n_out for l in self.layers]
        return f"ReluNetwork(widths={widths}, kinds={[l.kind for l in self.layers]})"


@dataclass(frozen=True)
class AffinePiece:
    """Region of the network input on which the network prefix is ``C x + d``.

    ``pattern`` holds one 0/1 tuple per ReLU layer processed so far.
    """

    domain: Polytope
    C: np.ndarray
    d: np.ndarray
    pattern: tuple = ()

    @classmethod
    def identity(cls, domain: Polytope) -> "AffinePiece":
        n = domain.dim
        return cls(domain, np.eye(n), np.zeros(n))

    def __call__(self, x):
        return np.asarray(x) @ self.C.T + self.d


def eval_network(net: ReluNetwork, x) -> np.ndarray:
    """Forward pass. ``x`` may be a single input or a batch of rows."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != net.n_in:
        raise DimensionError(f"input has dimension {x.shape[-1]}, network expects {net.n_in}")
    for layer in net.layers:
        x = layer(x)
    return x


class _Budget:
    def __init__(self, cap):
        self.cap = default_piece_cap() if cap is None else cap
        self.used = 0

    def take(self, k=1):
        self.used += k
        if self.used > self.cap:
            raise PieceCapExceeded(
                f"more than {self.cap} affine pieces; use hull mode or raise NNREACH_PIECE_CAP"
            )


def _range(domain: Polytope, a: np.ndarray):
    lo = lp_optimize(a, domain.H, domain.b, "min")
    hi = lp_optimize(a, domain.H, domain.b, "max")
    if LpStatus.INFEASIBLE in (lo.status, hi.status):
        return None
    lo_v = -np.inf if lo.status is LpStatus.UNBOUNDED else lo.value
    hi_v = np.inf if hi.status is LpStatus.UNBOUNDED else hi.value
    return lo_v, hi_v


def _split_piece(piece: AffinePiece, layer: Layer):
    """Depth-first per-neuron split of one piece; yields (domain, q) leaves.

    A neuron whose pre-activation keeps one sign on the current domain is
    fixed without adding a constraint. Otherwise both half-spaces are
    explored, the inactive side first. A side that touches the domain only
    along the switching hyperplane is never emitted: there the two patterns
    give the same output and the sibling already covers it.
    """
    Z = layer.W @ piece.C
    z0 = layer.W @ piece.d + layer.theta
    n = layer.n_out
    stack = [(piece.domain, ())]
    while stack:
        domain, q = stack.pop()
        i = len(q)
        if i == n:
            yield domain, q
            continue
        a, c = Z[i], z0[i]
        norm = float(np.linalg.norm(a))
        if norm <= 1e-14:
            stack.append((domain, q + (1 if c > 0 else 0,)))
            continue
        rng = _range(domain, a)
        if rng is None:
            continue
        lo, hi = rng[0] + c, rng[1] + c
        tol = GEO_TOL * max(1.0, norm, abs(c))
        if hi <= tol:
            stack.append((domain, q + (0,)))
        elif lo >= -tol:
            stack.append((domain, q + (1,)))
        else:
            active = Polytope(np.vstack([domain.H, -a]), np.append(domain.b, c))
            inactive = Polytope(np.vstack([domain.H, a]), np.append(domain.b, -c))
            # pushed in reverse so the q=0 branch is expanded first
            stack.append((active, q + (1,)))
            stack.append((inactive, q + (0,)))


def layer_reach(pieces: Iterable[AffinePiece], layer: Layer, piece_cap: int | None = None,
                _budget: _Budget | None = None) -> list[AffinePiece]:
    """Push pieces through a ReLU layer, splitting by activation pattern.

    Each emitted piece has ``C' = Q W C`` and ``d' = Q (W d + theta)``.
    """
    if layer.kind != "relu":
        raise ValueError("layer_reach handles relu layers; use linear_layer_reach")
    budget = _budget or _Budget(piece_cap)
    out = []
    for piece in pieces:
        if piece.C.shape[0] != layer.n_in:
            raise DimensionError(f"piece output has dimension {piece.C.shape[0]}, layer expects {layer.n_in}")
        for domain, q in _split_piece(piece, layer):
            budget.take()
            mask = np.array(q, dtype=float)[:, None]
            C = mask * (layer.W @ piece.C) + 0.0
            d = mask[:, 0] * (layer.W @ piece.d + layer.theta) + 0.0
            out.append(AffinePiece(domain, C, d, piece.pattern + (q,)))
    return out


def linear_layer_reach(pieces: Iterable[AffinePiece], layer: Layer) -> list[AffinePiece]:
    """Compose each piece with ``W v + theta``; domains are unchanged."""
    out = []
    for piece in pieces:
        if piece.C.shape[0] != layer.n_in:
            raise DimensionError(f"piece output has dimension {piece.C.shape[0]}, layer expects {layer.n_in}")
        out.append(AffinePiece(piece.domain, layer.W @ piece.C, layer.W @ piece.d + layer.theta, piece.pattern))
    return out


def _as_parts(input_set) -> list[Polytope]:
    if isinstance(input_set, Polytope):
        return [input_set]
    return list(input_set)


def network_reach(input_set, net: ReluNetwork, piece_cap: int | None = None) -> list[AffinePiece]:
    """Affine pieces of ``net`` over a polytope or union of polytopes.

    The domains cover the input set and overlap only on shared facets; on
    each domain the network equals ``C x + d``.

    Raises
    ------
    PieceCapExceeded
        When more than ``piece_cap`` pieces are created over the whole call.
    """
    parts = _as_parts(input_set)
    for p in parts:
        if p.dim != net.n_in:
            raise DimensionError(f"input part has dimension {p.dim}, network expects {net.n_in}")
    budget = _Budget(piece_cap)
    pieces = [AffinePiece.identity(p) for p in parts]
    for layer in net.layers:
        if layer.kind == "relu":
            pieces = layer_reach(pieces, layer, _budget=budget)
        else:
            pieces = linear_layer_reach(pieces, layer)
    return pieces


def output_set(pieces: Iterable[AffinePiece]) -> PolyUnion:
    """Union of the images ``C(domain) + d`` in canonical order."""
    return PolyUnion(affine_image(p.domain, p.C, p.d) for p in pieces)


def find_piece(pieces: Sequence[AffinePiece], x, tau: float = 1e-7) -> AffinePiece | None:
    """First piece whose domain contains ``x``."""
    x = np.asarray(x, dtype=float)
    for p in pieces:
        if np.all(p.domain.H @ x <= p.domain.b + tau):
            return p
    return None
