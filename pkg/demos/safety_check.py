"""Safety check against the unsafe box and an SVG picture of the result.

Usage: python3 safety_check.py [output-dir]
"""
import sys
from pathlib import Path

from relureach import check_safety, load_model, reach_interval, simulate_grid
from relureach.svg import render

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
model = load_model("paper_sec4")
args = (model.system, model.switching, model.network, model.initial_set)
print("unsafe region:", model.unsafe.label)

for k in (5, 10):
    result = reach_interval(*args, k, mode="hull")
    verdict = check_safety(result, model.unsafe)
    line = f"horizon {k:2d}: {verdict.status}"
    if not verdict.safe:
        line += f", first hit at step {verdict.first_violation_step}, witness {verdict.witness.round(4)}"
    print(line)

    trajs = simulate_grid(*args, 0.1, k)
    svg = render([P for X in result.per_step for P in X], list(model.unsafe.unsafe), trajs,
                 title=f"hull reach set over [0, {k}]")
    path = out_dir / f"reach_k{k}.svg"
    path.write_text(svg)
    print("  wrote", path)
