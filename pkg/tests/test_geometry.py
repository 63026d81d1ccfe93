import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relureach import (PolyUnion, Polytope, affine_image, contains_point, convex_hull, hull_of_union,
                       intersect, is_empty, minkowski_sum, remove_redundant, vertices)
from relureach.exceptions import DimensionError, EmptyPolytopeError, UnboundedPolytopeError

from conftest import brute_vertices, in_hull_lp, random_polytope, sample_polytope

seeds = st.integers(0, 2**32 - 1)


def same_points(A, B, tol=1e-7):
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape:
        return False
    return all(np.min(np.max(np.abs(B - a), axis=1)) <= tol for a in A)


def test_unit_square_vertices_and_hull_round_trip():
    P = Polytope.box([0.0, 0.0], 1.0)
    V = vertices(P)
    assert V.tolist() == [[-1, -1], [-1, 1], [1, -1], [1, 1]]
    Q = convex_hull(V)
    assert Q.n_constraints == 4
    assert same_points(vertices(Q), V, 1e-12)


def test_triangle_hull_drops_interior_point():
    pts = [[0, 0], [1, 0], [0, 1], [0.25, 0.25]]
    Q = convex_hull(pts)
    assert Q.n_constraints == 3
    assert same_points(vertices(Q), [[0, 0], [0, 1], [1, 0]])


def test_rows_are_unit_norm_and_zero_rows_handled():
    P = Polytope([[3.0, 4.0], [0.0, 0.0], [-1.0, 0.0], [0.0, -2.0]], [5.0, 1.0, 0.0, 0.0])
    assert np.allclose(np.linalg.norm(P.H, axis=1), 1.0)
    assert P.n_constraints == 3
    assert is_empty(Polytope([[0.0, 0.0]], [-1.0]))


def test_point_and_segment_hulls_are_degenerate():
    pt = convex_hull([[1.0, 2.0]])
    assert same_points(vertices(pt), [[1.0, 2.0]])
    seg = convex_hull([[0, 0], [1, 1], [2, 2], [0.5, 0.5]])
    assert same_points(vertices(seg), [[0, 0], [2, 2]])
    assert contains_point(seg, [1.5, 1.5])
    assert not contains_point(seg, [1.0, 1.1])


def test_flat_polygon_in_3d():
    pts = [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1], [0.5, 0.5, 1]]
    Q = convex_hull(pts)
    assert same_points(vertices(Q), [[0, 0, 1], [0, 1, 1], [1, 0, 1], [1, 1, 1]])
    assert not contains_point(Q, [0.5, 0.5, 1.01])


def test_cube_hull_has_six_facets():
    pts = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], float)
    Q = convex_hull(pts)
    assert Q.n_constraints == 6


def test_unbounded_and_empty_vertices_raise():
    with pytest.raises(UnboundedPolytopeError):
        vertices(Polytope([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0]))
    with pytest.raises(EmptyPolytopeError):
        vertices(Polytope([[1.0], [-1.0]], [-2.0, 1.0]))


def test_dimension_mismatch_errors():
    with pytest.raises(DimensionError):
        intersect(Polytope.box([0, 0], 1), Polytope.box([0], 1))
    with pytest.raises(DimensionError):
        affine_image(Polytope.box([0, 0], 1), np.eye(3), np.zeros(3))
    with pytest.raises(DimensionError):
        contains_point(Polytope.box([0, 0], 1), [0.0])


def test_remove_redundant_on_box_with_extra_rows():
    H = np.vstack([np.eye(2), -np.eye(2), [[1, 1], [1, -1]]])
    b = np.array([1, 1, 1, 1, 5, 5.0])
    R = remove_redundant(Polytope(H, b))
    assert R.n_constraints == 4


def test_large_constraint_count_vertex_enumeration():
    # regular 60-gon: exercises the path for many rows
    t = np.linspace(0, 2 * np.pi, 60, endpoint=False)
    H = np.stack([np.cos(t), np.sin(t)], axis=1)
    P = Polytope(H, np.ones(60))
    V = vertices(P)
    assert V.shape == (60, 2)
    assert np.allclose(np.linalg.norm(V, axis=1), 1 / np.cos(np.pi / 60))


def test_affine_image_examples():
    P = Polytope.box([0, 0], 1.0)
    img = affine_image(P, [[2, 0], [0, 1]], [1, 0])
    assert same_points(vertices(img), [[-1, -1], [-1, 1], [3, -1], [3, 1]])
    # rank-deficient map collapses to a segment
    seg = affine_image(P, [[1, 1], [1, 1]], [0, 0])
    assert same_points(vertices(seg), [[-2, -2], [2, 2]])


def test_minkowski_sum_of_boxes():
    S = minkowski_sum(Polytope.box([0, 0], 1), Polytope.box([3, 0], 0.5))
    assert same_points(vertices(S), [[1.5, -1.5], [1.5, 1.5], [4.5, -1.5], [4.5, 1.5]])


def test_polyunion_order_is_canonical():
    a, b = Polytope.box([0, 0], 1), Polytope.box([5, 5], 1)
    assert PolyUnion([a, b])[0] is PolyUnion([b, a])[0]
    empty = Polytope([[1.0, 0.0], [-1.0, 0.0]], [-1.0, 0.0])
    assert len(PolyUnion([a, empty])) == 1


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 3))
def test_vertices_match_brute_force(seed, n):
    P = random_polytope(np.random.default_rng(seed), n)
    V = vertices(P)
    ref = brute_vertices(P.H, P.b)
    # brute force may repeat degenerate vertices
    uniq = [v for i, v in enumerate(ref) if all(np.max(np.abs(v - w)) > 1e-7 for w in ref[:i])]
    assert same_points(V, np.array(uniq), 1e-7)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 3))
def test_hull_of_points_equals_extreme_points(seed, n):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(int(rng.integers(n + 1, 15)), n))
    Q = convex_hull(pts)
    V = vertices(Q)
    # each vertex of the hull is an input point that is not a combination of the others
    for v in V:
        i = int(np.argmin(np.max(np.abs(pts - v), axis=1)))
        assert np.max(np.abs(pts[i] - v)) <= 1e-7
        assert not in_hull_lp(np.delete(pts, i, axis=0), v)
    # every input point that is extreme is a vertex of the hull
    for i, p in enumerate(pts):
        if not in_hull_lp(np.delete(pts, i, axis=0), p):
            assert np.min(np.max(np.abs(V - p), axis=1)) <= 1e-7
    assert all(contains_point(Q, p) for p in pts)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_intersection_commutative_and_associative_by_sampling(seed):
    rng = np.random.default_rng(seed)
    P, Q, R = (random_polytope(rng, 2) for _ in range(3))
    X = rng.uniform(-4, 4, size=(2000, 2))

    def member(S):
        return np.all(X @ S.H.T <= S.b + 1e-9, axis=1)

    assert np.array_equal(member(intersect(P, Q)), member(intersect(Q, P)))
    assert np.array_equal(member(intersect(intersect(P, Q), R)), member(intersect(P, intersect(Q, R))))
    assert np.array_equal(member(intersect(P, Q)), member(P) & member(Q))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_affine_image_contains_mapped_samples(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 2)
    C = rng.normal(size=(2, 2))
    d = rng.normal(size=2)
    img = affine_image(P, C, d)
    for x in sample_polytope(P, 200, rng):
        assert contains_point(img, C @ x + d, 1e-7)
    assert same_points(vertices(affine_image(P, np.eye(2), np.zeros(2))), vertices(P), 1e-7)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_hull_of_union_contains_every_part(seed):
    rng = np.random.default_rng(seed)
    parts = [random_polytope(rng, 2) for _ in range(3)]
    Hu = hull_of_union(parts)
    for p in parts:
        assert all(contains_point(Hu, v, 1e-7) for v in vertices(p))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_remove_redundant_preserves_membership(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 2, m_max=12)
    # add implied rows: shifted copies of existing rows
    extra_H = P.H[:3]
    P2 = Polytope(np.vstack([P.H, extra_H]), np.concatenate([P.b, P.b[:3] + 0.5]))
    R = remove_redundant(P2)
    assert R.n_constraints <= P.n_constraints
    X = rng.uniform(-5, 5, size=(10_000, 2))
    a = np.all(X @ P2.H.T <= P2.b + 1e-9, axis=1)
    b = np.all(X @ R.H.T <= R.b + 1e-9, axis=1)
    assert np.array_equal(a, b)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_minkowski_sum_contains_sample_sums(seed):
    rng = np.random.default_rng(seed)
    P, Q = random_polytope(rng, 2), random_polytope(rng, 2)
    S = minkowski_sum(P, Q)
    xs, ys = sample_polytope(P, 100, rng), sample_polytope(Q, 100, rng)
    assert all(contains_point(S, x + y, 1e-7) for x, y in zip(xs, ys))
