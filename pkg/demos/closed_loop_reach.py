"""Reach sets of the switched closed loop, exact and hull modes.

Exact mode keeps one polytope per affine piece of the controller, which
grows quickly with the horizon. Hull mode keeps one polytope per step.
"""
import time

from relureach import load_model, reach_interval, simulate_grid, validate_containment, vertices

model = load_model("paper_sec4")
args = (model.system, model.switching, model.network, model.initial_set)

t0 = time.perf_counter()
exact = reach_interval(*args, 3, mode="exact")
print(f"exact, 3 steps: parts per step {exact.piece_counts} ({time.perf_counter() - t0:.2f} s)")

for coupling in ("decoupled", "coupled"):
    t0 = time.perf_counter()
    hull = reach_interval(*args, 10, mode="hull", coupling=coupling)
    print(f"\nhull ({coupling}), 10 steps ({time.perf_counter() - t0:.2f} s)")
    for h, X in enumerate(hull.per_step):
        V = vertices(X[0])
        print(f"  step {h:2d} mode {'-' if h == 0 else hull.mode_ids[h - 1]}: "
              f"x1 in [{V[:, 0].min():+.3f}, {V[:, 0].max():+.3f}], "
              f"x2 in [{V[:, 1].min():+.3f}, {V[:, 1].max():+.3f}]")

# Simulated trajectories from a 0.1 grid on the initial box stay inside.
trajs = simulate_grid(*args, 0.1, 10)
print("\ncontainment:", validate_containment(trajs, hull).summary())
