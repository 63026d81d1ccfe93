import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from relureach import Layer, Polytope, PwlSystem, ReluNetwork, SwitchingSignal, load_model

# Numerical example matrices, typed in independently of the bundled JSON.
A1 = [[-1.0609, -1.0645], [0.6600, -0.6178]]
B1 = [[-0.9759, 0.3688], [0.5874, 2.5345]]
A2 = [[-0.5487, -0.0196], [0.3390, 1.2870]]
B2 = [[0.5573, 1.0926], [-0.6622, 0.9284]]
W1 = [[-0.4949, -0.4273], [-0.6112, -0.5277], [-0.4287, -0.5161], [0.0585, -0.3319]]
T1 = [-0.1971, -0.2435, 0.9452, 0.3945]
W2 = [[0.5891, -0.4770, 0.0849, 0.2686], [0.3210, -0.2599, 0.1594, -0.0423]]
T2 = [-0.1862, -0.1339]


@pytest.fixture(scope="session")
def example_net():
    return ReluNetwork([Layer(W1, T1, "relu"), Layer(W2, T2, "relu")])


@pytest.fixture(scope="session")
def example_sys():
    return PwlSystem([(A1, B1), (A2, B2)])


@pytest.fixture(scope="session")
def example_model():
    return load_model("paper_sec4")


@pytest.fixture(scope="session")
def X0():
    return Polytope.box([0.0, 0.0], 1.0)


@pytest.fixture(scope="session")
def unsafe_box():
    return Polytope.box([4.0, 4.0], 1.0)


def signal(sigma0=1):
    return SwitchingSignal.periodic([1, 2], sigma0)


def box_grid(lo, hi, step):
    """Inclusive grid, built from integer counts so endpoints are exact."""
    axes = [np.linspace(a, b, int(round((b - a) / step)) + 1) for a, b in zip(lo, hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))


def scipy_bbox(H, b):
    """Bounding box by scipy's HiGHS solver: independent of the package's simplex."""
    H = np.asarray(H, float)
    n = H.shape[1]
    lo, hi = np.empty(n), np.empty(n)
    for i in range(n):
        c = np.zeros(n)
        c[i] = 1.0
        r1 = linprog(c, A_ub=H, b_ub=b, bounds=[(None, None)] * n, method="highs")
        r2 = linprog(-c, A_ub=H, b_ub=b, bounds=[(None, None)] * n, method="highs")
        assert r1.status == 0 and r2.status == 0
        lo[i], hi[i] = r1.fun, -r2.fun
    return lo, hi


def sample_polytope(P, n, rng, boundary_frac=0.0):
    """Rejection samples from P (bbox from scipy); P must be full-dimensional."""
    lo, hi = scipy_bbox(P.H, P.b)
    out = []
    while sum(len(o) for o in out) < n:
        X = rng.uniform(lo, hi, size=(4 * n, len(lo)))
        out.append(X[np.all(X @ P.H.T <= P.b + 1e-12, axis=1)])
    return np.vstack(out)[:n]


def in_hull_lp(points, x, tol=1e-9):
    """Is x a convex combination of ``points``? (scipy LP, independent oracle)"""
    P = np.asarray(points, float)
    k = P.shape[0]
    A_eq = np.vstack([P.T, np.ones((1, k))])
    b_eq = np.append(x, 1.0)
    r = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    return r.status == 0


def brute_vertices(H, b, tol=1e-9):
    """All basic feasible points by exhaustive n-subset solving."""
    H = np.asarray(H, float)
    b = np.asarray(b, float)
    m, n = H.shape
    found = []
    for idx in itertools.combinations(range(m), n):
        M = H[list(idx)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        v = np.linalg.solve(M, b[list(idx)])
        if np.all(H @ v <= b + tol * max(1.0, np.abs(b).max())):
            found.append(v)
    return np.array(found).reshape(-1, n)


def random_polytope(rng, n, m_max=10):
    """Random bounded full-dimensional polytope with at most ``m_max`` rows."""
    while True:
        m = rng.integers(n + 1, m_max + 1)
        H = rng.normal(size=(m, n))
        b = rng.uniform(0.3, 2.0, size=m) + H @ rng.uniform(-1, 1, size=n)
        r = linprog(np.zeros(n), A_ub=H, b_ub=b, bounds=[(None, None)] * n, method="highs")
        if r.status != 0:
            continue
        bounded = True
        for i in range(n):
            for s in (1, -1):
                c = np.zeros(n)
                c[i] = s
                if linprog(c, A_ub=H, b_ub=b, bounds=[(None, None)] * n, method="highs").status == 3:
                    bounded = False
        if bounded:
            return Polytope(H, b)
