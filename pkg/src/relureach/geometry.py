"""Polytope algebra in half-space representation.

A :class:`Polytope` is the closed set ``{x | H x <= b}``; rows of ``H`` are
kept at unit Euclidean norm so that the absolute tolerances below mean the
same thing for every constraint. Equalities are stored as inequality pairs,
which makes lower-dimensional (degenerate) polytopes ordinary values.

Vertex enumeration is brute force over ``n``-subsets of active rows. That is
plenty for state dimensions 2 and 3, which is what the closed-loop examples
use; convex hulls are delegated to Qhull through :mod:`scipy.spatial`.
"""
from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError, cKDTree

from .exceptions import DimensionError, EmptyPolytopeError, UnboundedPolytopeError
from .lp import LpStatus, as_matrix, as_vector, lp_feasible, lp_optimize

GEO_TOL = 1e-8
CONTAIN_TOL = 1e-7

# row count up to which vertices come from brute-force active-set enumeration
_SUBSET_ROWS = 24


class Polytope:
    """Closed convex polyhedron ``{x | H x <= b}``.

    Parameters
    ----------
    H : array_like, shape (m, n)
    b : array_like, shape (m,)
    vertices : array_like, optional
        Known vertex set. Only pass this when it is exact; it short-circuits
        :func:`vertices`.
    normalize : bool
        Scale rows to unit norm (default). Pass False only for rows that are
        already normalized, e.g. when reloading serialized polytopes.
    """

    def __init__(self, H, b, vertices=None, normalize=True):
        H = as_matrix(H)
        b = as_vector(b)
        if H.shape[0] != b.shape[0]:
            raise DimensionError(f"H has {H.shape[0]} rows but b has length {b.shape[0]}")
        if H.shape[1] < 1:
            raise DimensionError("polytope dimension must be at least 1")
        norms = np.linalg.norm(H, axis=1) if normalize else np.ones(H.shape[0])
        zero = np.linalg.norm(H, axis=1) <= 1e-14
        infeasible_zero_row = bool(np.any(b[zero] < -GEO_TOL))
        keep = ~zero
        H = H[keep] / norms[keep, None] + 0.0
        b = b[keep] / norms[keep] + 0.0
        if infeasible_zero_row:
            # 0 . x <= -1 keeps the polytope empty without a degenerate row
            H = np.vstack([H, np.zeros((1, H.shape[1]))])
            b = np.append(b, -1.0)
        H.setflags(write=False)
        b.setflags(write=False)
        self.H = H
        self.b = b
        if vertices is not None:
            v = np.asarray(vertices, dtype=float).reshape(-1, H.shape[1])
            v = _sort_rows(v) if normalize else v.copy()
            v.setflags(write=False)
            self.__dict__["vertices"] = v

    @property
    def dim(self) -> int:
        return self.H.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.H.shape[0]

    @classmethod
    def box(cls, center, radius) -> "Polytope":
        """Infinity-norm ball ``||x - center||_inf <= radius``."""
        center = as_vector(center, "center")
        if np.ndim(radius) == 0:
            radius = np.full(center.shape, float(radius))
        lo, hi = center - radius, center + radius
        return cls.from_bounds(lo, hi)

    @classmethod
    def from_bounds(cls, lo, hi) -> "Polytope":
        lo = as_vector(lo, "lo")
        hi = as_vector(hi, "hi")
        n = lo.shape[0]
        eye = np.eye(n)
        H = np.vstack([eye, -eye])
        b = np.concatenate([hi, -lo])
        corners = np.array(list(itertools.product(*zip(lo, hi)))) if np.all(lo <= hi) else None
        return cls(H, b, vertices=corners)

    @cached_property
    def vertices(self) -> np.ndarray:
        return _enumerate_vertices(self)

    def contains(self, x, tau: float = CONTAIN_TOL) -> bool:
        return contains_point(self, x, tau)

    def __repr__(self):
        return f"Polytope(dim={self.dim}, rows={self.n_constraints})"


class PolyUnion:
    """Finite union of polytopes of a common dimension.

    Empty parts are dropped. With ``sort=True`` (the default) the parts are
    put in canonical order: lexicographic by their sorted vertex arrays,
    which needs every part to be bounded.
    """

    def __init__(self, parts: Iterable[Polytope] = (), dim: int | None = None, sort: bool = True):
        parts = [p for p in parts if not is_empty(p)]
        dims = {p.dim for p in parts}
        if dim is not None:
            dims.add(dim)
        if len(dims) > 1:
            raise DimensionError(f"union parts have mixed dimensions {sorted(dims)}")
        self.dim = dims.pop() if dims else None
        if sort:
            parts.sort(key=_canonical_key)
        self.parts = tuple(parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def contains(self, x, tau: float = CONTAIN_TOL) -> bool:
        return any(contains_point(p, x, tau) for p in self.parts)

    def __repr__(self):
        return f"PolyUnion({len(self.parts)} parts, dim={self.dim})"


def _canonical_key(p: Polytope):
    return tuple(map(tuple, p.vertices))


def _sort_rows(a: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0:
        return a.copy()
    order = np.lexsort(a.T[::-1])
    return a[order] + 0.0


def _dedup(points: np.ndarray, tol: float) -> np.ndarray:
    """Drop points within ``tol`` (infinity norm) of an earlier kept point; sorted output."""
    pts = _sort_rows(points)
    if pts.shape[0] < 2:
        return pts
    pairs = cKDTree(pts).query_pairs(tol, p=np.inf, output_type="ndarray")
    keep = np.ones(pts.shape[0], dtype=bool)
    if pairs.size:
        pairs = pairs[np.lexsort((pairs[:, 0], pairs[:, 1]))]
        for i, j in pairs:
            if keep[i] and keep[j]:
                keep[j] = False
    return pts[keep]


def is_empty(P: Polytope) -> bool:
    """True iff ``P`` has no point (decided by an LP)."""
    if "vertices" in P.__dict__ and len(P.__dict__["vertices"]):
        return False
    return not lp_feasible(P.H, P.b).feasible


def intersect(P: Polytope, Q: Polytope) -> Polytope:
    """Intersection by stacking constraint rows. The result may be empty."""
    if P.dim != Q.dim:
        raise DimensionError(f"cannot intersect dimension {P.dim} with {Q.dim}")
    return Polytope(np.vstack([P.H, Q.H]), np.concatenate([P.b, Q.b]))


def contains_point(P: Polytope, x, tau: float = CONTAIN_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    if x.shape != (P.dim,):
        raise DimensionError(f"point has shape {x.shape}, expected ({P.dim},)")
    return bool(np.all(P.H @ x <= P.b + tau))


def contains_points(P: Polytope, X, tau: float = CONTAIN_TOL) -> np.ndarray:
    """Vectorized membership mask for the rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.all(X @ P.H.T <= P.b + tau, axis=1)


def remove_redundant(P: Polytope) -> Polytope:
    """Drop every row implied by the others.

    Each removal is certified by maximizing the row's left-hand side over the
    remaining rows; a row stays if that maximum exceeds its bound or is
    unbounded.
    """
    if is_empty(P):
        raise EmptyPolytopeError("remove_redundant needs a non-empty polytope")
    keep = np.ones(P.n_constraints, dtype=bool)
    for i in range(P.n_constraints):
        keep[i] = False
        others = np.nonzero(keep)[0]
        out = lp_optimize(P.H[i], P.H[others], P.b[others], sense="max")
        if out.status is LpStatus.UNBOUNDED or out.value > P.b[i] + GEO_TOL:
            keep[i] = True
    cached = P.__dict__.get("vertices")
    return Polytope(P.H[keep], P.b[keep], vertices=cached)


def chebyshev_center(P: Polytope):
    """Center and radius of the largest inscribed ball (radius < 0 means empty)."""
    n = P.dim
    H = np.hstack([P.H, np.ones((P.n_constraints, 1))])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    # radius bounded below so the LP stays feasible for empty and flat sets
    H = np.vstack([H, -c])
    b = np.append(P.b, 1.0)
    out = lp_optimize(c, H, b, sense="max")
    if out.status is LpStatus.UNBOUNDED:
        raise UnboundedPolytopeError("unbounded polytope")
    return out.point[:n], float(out.value)


def check_bounded(P: Polytope) -> np.ndarray:
    """Return the bounding box ``[[lo...], [hi...]]``; raise if ``P`` is empty or unbounded."""
    n = P.dim
    lo, hi = np.empty(n), np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        for sense, target in (("max", hi), ("min", lo)):
            out = lp_optimize(e, P.H, P.b, sense=sense)
            if out.status is LpStatus.INFEASIBLE:
                raise EmptyPolytopeError("polytope is empty")
            if out.status is LpStatus.UNBOUNDED:
                raise UnboundedPolytopeError("unbounded polytope")
            target[i] = out.value
    return np.vstack([lo, hi])


def _enumerate_vertices(P: Polytope) -> np.ndarray:
    box = check_bounded(P)
    n = P.dim
    scale = max(1.0, float(np.max(np.abs(box))))
    if P.n_constraints > _SUBSET_ROWS:
        center, radius = chebyshev_center(P)
        if radius > GEO_TOL * scale:
            hs = HalfspaceIntersection(np.hstack([P.H, -P.b[:, None]]), center)
            return _dedup(hs.intersections, GEO_TOL * scale)
        P = remove_redundant(P)
    H, b = P.H, P.b
    m = H.shape[0]
    if n == 1:
        # rows are +-1 after normalization
        return np.array([[box[0, 0]], [box[1, 0]]]) if box[1, 0] - box[0, 0] > GEO_TOL * scale else box[:1].copy()
    idx = np.array(list(itertools.combinations(range(m), n)), dtype=int)
    M = H[idx]
    rhs = b[idx]
    sv = np.linalg.svd(M, compute_uv=False)
    ok = sv[:, -1] > GEO_TOL * sv[:, 0]
    if not np.any(ok):
        raise EmptyPolytopeError("no vertex found")
    V = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
    tol = GEO_TOL * max(scale, float(np.max(np.abs(b))))
    feas = np.all(V @ H.T <= b + tol, axis=1)
    V = V[feas]
    if V.shape[0] == 0:
        # feasible within LP tolerance but no exact vertex: collapse to the LP witness
        V = lp_feasible(H, b).point[None, :]
    return _dedup(V, GEO_TOL * scale)


def vertices(P: Polytope) -> np.ndarray:
    """Vertex array of a bounded non-empty polytope, rows sorted lexicographically.

    Raises
    ------
    UnboundedPolytopeError, EmptyPolytopeError
    """
    return P.vertices


def _principal_axes(spread: np.ndarray):
    """Singular values and a full orthonormal basis of right singular vectors."""
    n = spread.shape[1]
    if spread.shape[0] < n:
        spread = np.vstack([spread, np.zeros((n - spread.shape[0], n))])
    _, s, Vt = np.linalg.svd(spread, full_matrices=False)
    return s, Vt


def _affine_rank(pts: np.ndarray):
    center = pts.mean(axis=0)
    spread = pts - center
    scale = max(1.0, float(np.max(np.abs(pts))))
    if pts.shape[0] == 1:
        return center, 0, np.zeros((pts.shape[1], 0)), np.eye(pts.shape[1])
    s, Vt = _principal_axes(spread)
    r = int(np.sum(s > GEO_TOL * scale * math.sqrt(pts.shape[0])))
    return center, r, Vt[:r].T, Vt[r:].T


def convex_hull(points: Sequence) -> Polytope:
    """Minimal H-representation of the convex hull of ``points``.

    Point sets that are not full-dimensional yield equality pairs for their
    affine hull plus the facets of the hull within it.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("convex_hull needs at least one point")
    scale = max(1.0, float(np.max(np.abs(pts))))
    pts = _dedup(pts, GEO_TOL * scale)
    center, r, U, N = _affine_rank(pts)
    while True:
        try:
            H_in, b_in, ext = _hull_in_subspace(pts, center, r, U)
            break
        except QhullError:
            # numerically flat: treat as one dimension lower
            r -= 1
            _, Vt = _principal_axes(pts - center)
            U, N = Vt[:r].T, Vt[r:].T
    rows = [H_in]
    rhs = [b_in]
    if N.shape[1]:
        off = N.T @ center
        rows += [N.T, -N.T]
        rhs += [off, -off]
    H = np.vstack(rows)
    b = np.concatenate(rhs)
    return Polytope(H, b, vertices=pts[ext])


def _hull_in_subspace(pts, center, r, U):
    n = pts.shape[1]
    if r == 0:
        return np.zeros((0, n)), np.zeros(0), np.array([0])
    y = (pts - center) @ U
    if r == 1:
        lo, hi = int(np.argmin(y[:, 0])), int(np.argmax(y[:, 0]))
        u = U[:, 0]
        H = np.vstack([u, -u])
        b = np.array([y[hi, 0] + u @ center, -y[lo, 0] - u @ center])
        return H, b, np.array(sorted({lo, hi}))
    hull = ConvexHull(y)
    eq = hull.equations
    normals = eq[:, :-1]
    offsets = -eq[:, -1]
    # merge coplanar facets (Qhull triangulates in 3-D and up)
    key = np.round(np.hstack([normals, offsets[:, None]]), 9)
    _, first = np.unique(key, axis=0, return_index=True)
    first.sort()
    normals, offsets = normals[first], offsets[first]
    H = normals @ U.T
    b = offsets + H @ center
    return H, b, hull.vertices


def affine_image(P: Polytope, C, d) -> Polytope:
    """``{C x + d | x in P}`` for bounded ``P``, via the mapped vertex set."""
    C = as_matrix(C, "C")
    d = as_vector(d, "d")
    if C.shape[1] != P.dim or C.shape[0] != d.shape[0]:
        raise DimensionError(f"map of shape {C.shape} + ({d.shape[0]},) does not fit dimension {P.dim}")
    V = vertices(P)
    return convex_hull(V @ C.T + d)


def hull_of_union(U: PolyUnion | Iterable[Polytope]) -> Polytope:
    """Convex hull of a union of bounded polytopes."""
    parts = list(U)
    if not parts:
        raise EmptyPolytopeError("hull of an empty union")
    return convex_hull(np.vstack([vertices(p) for p in parts]))


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    """``{p + q | p in P, q in Q}`` for bounded polytopes."""
    if P.dim != Q.dim:
        raise DimensionError(f"cannot add dimension {P.dim} to {Q.dim}")
    VP, VQ = vertices(P), vertices(Q)
    return convex_hull((VP[:, None, :] + VQ[None, :, :]).reshape(-1, P.dim))
