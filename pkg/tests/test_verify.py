import numpy as np
import pytest

from relureach import (PolyUnion, Polytope, ReachResult, SafetySpec, check_safety, contains_point,
                       reach_interval, simulate_grid, validate_containment)
from relureach.exceptions import DimensionError
from relureach.verify import grid_points

from conftest import signal


def fake_result(sets, mode="hull", coupling="decoupled"):
    per_step = [PolyUnion([s]) for s in sets]
    return ReachResult(per_step, mode, [1] * (len(sets) - 1), [1] * len(sets), coupling=coupling)


def test_disjoint_boxes_are_safe(X0, unsafe_box):
    v = check_safety(fake_result([X0] * 4), SafetySpec(unsafe_box))
    assert v.safe and v.first_violation_step is None and v.witness is None


def test_step_equal_to_unsafe_set_is_first_violation(X0, unsafe_box):
    v = check_safety(fake_result([X0, X0, X0, unsafe_box, X0]), SafetySpec(unsafe_box))
    assert v.status == "Uncertain" and v.first_violation_step == 3
    assert contains_point(unsafe_box, v.witness, 1e-7)
    assert not v.conclusive


def test_exact_coupled_violation_is_conclusive(X0, unsafe_box):
    v = check_safety(fake_result([X0, unsafe_box], "exact", "coupled"), SafetySpec(unsafe_box))
    assert v.first_violation_step == 1 and v.conclusive


def test_spec_validation(X0):
    with pytest.raises(ValueError):
        SafetySpec(PolyUnion([]))
    with pytest.raises(DimensionError):
        check_safety(fake_result([X0]), SafetySpec(Polytope.box([0, 0, 0], 1)))


@pytest.fixture(scope="module")
def hull_runs(example_sys, example_net, X0):
    return {k: reach_interval(example_sys, signal(), example_net, X0, k) for k in (5, 10)}


def test_example_model_verdicts(hull_runs, unsafe_box):
    spec = SafetySpec(unsafe_box)
    assert check_safety(hull_runs[5], spec).safe
    v = check_safety(hull_runs[10], spec)
    assert v.status == "Uncertain"
    X = hull_runs[10].per_step[v.first_violation_step][0]
    assert contains_point(X, v.witness, 1e-7) and contains_point(unsafe_box, v.witness, 1e-7)


def test_verdict_monotone_in_horizon(hull_runs, unsafe_box):
    spec = SafetySpec(unsafe_box)
    full = hull_runs[10]
    first = check_safety(full, spec).first_violation_step
    for h in range(11):
        prefix = ReachResult(full.per_step[: h + 1], full.mode, full.mode_ids[:h], coupling=full.coupling)
        v = check_safety(prefix, spec)
        assert v.safe == (h < first)
    assert check_safety(hull_runs[5], spec).safe


@pytest.mark.parametrize("eps", [0.0, 0.01, 0.5, 2.0])
def test_enlarged_unsafe_set_never_becomes_safe(hull_runs, unsafe_box, eps):
    spec = SafetySpec(Polytope(unsafe_box.H, unsafe_box.b + eps))
    v = check_safety(hull_runs[10], spec)
    assert v.status == "Uncertain"
    assert v.first_violation_step <= check_safety(hull_runs[10], SafetySpec(unsafe_box)).first_violation_step


def test_grid_counts(X0):
    assert len(grid_points(X0, 0.1)) == 441
    assert len(grid_points(X0, 0.1, "centered")) == 400
    assert len(grid_points(X0, 2.0)) == 4
    assert len(grid_points(Polytope.from_bounds([0.5, 0.5], [0.5, 0.5]), 0.1)) == 1
    with pytest.raises(ValueError):
        grid_points(X0, 0.0)


def test_grid_filters_non_box_sets():
    tri = Polytope([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
    G = grid_points(tri, 0.5)
    # (0,0) (0,.5) (0,1) (.5,0) (.5,.5) (1,0)
    assert len(G) == 6


def test_containment_of_grid_trajectories(example_sys, example_net, X0, hull_runs):
    trajs = simulate_grid(example_sys, signal(), example_net, X0, 0.1, 10)
    assert len(trajs) == 441 and trajs[0].shape == (11, 2)
    rep = validate_containment(trajs, hull_runs[10], 1e-6)
    assert rep.ok and rep.misses == [0] * 11
    assert rep.summary().startswith("0 misses out of 4851 states")


def test_shifted_trajectory_flagged_at_step_zero(example_sys, example_net, X0, hull_runs):
    trajs = simulate_grid(example_sys, signal(), example_net, X0, 1.0, 10)
    bad = np.asarray(trajs) + 10.0
    rep = validate_containment(bad, hull_runs[10])
    assert not rep.ok and rep.misses[0] == len(trajs)
    with pytest.raises(DimensionError):
        validate_containment(np.asarray(trajs)[:, :5], hull_runs[10])


def test_coupled_hull_is_tighter_on_example_model(example_sys, example_net, X0, unsafe_box):
    # keeping x and g(x) linked through each affine piece removes the [0, 10] intersection
    for s in (1, 2):
        res = reach_interval(example_sys, signal(s), example_net, X0, 10, mode="hull", coupling="coupled")
        assert check_safety(res, SafetySpec(unsafe_box)).safe
