"""Exact output set of a two-layer ReLU controller.

The bundled example network maps the box ``||x||_inf <= 1`` to a union of
polytopes. We compute it piece by piece and compare against a brute-force
forward pass on a fine grid.
"""
import numpy as np

from relureach import eval_network, load_model, network_reach, output_set, vertices
from relureach.network import find_piece

model = load_model("paper_sec4")
net = model.network
X0 = model.initial_set
print(net)

pieces = network_reach(X0, net)
print(f"{len(pieces)} affine pieces over the initial box")
for p in pieces:
    q = " | ".join("".join(map(str, layer)) for layer in p.pattern)
    print(f"  pattern {q}: {len(vertices(p.domain))}-corner domain")

# Every grid point is covered by a piece, and the piece's affine map agrees
# with the network there.
axis = np.linspace(-1.0, 1.0, 201)
grid = np.stack(np.meshgrid(axis, axis, indexing="ij"), -1).reshape(-1, 2)
Y = eval_network(net, grid)
err = max(np.abs(find_piece(pieces, x)(x) - y).max() for x, y in zip(grid, Y))
print(f"max |g(x) - (C x + d)| over {len(grid)} grid points: {err:.1e}")

U = output_set(pieces)
V = np.vstack([vertices(P) for P in U])
print(f"output set: {len(U)} polytopes, bounding box {V.min(axis=0)} .. {V.max(axis=0)}")
print(f"grid outputs span {Y.min(axis=0)} .. {Y.max(axis=0)}")
