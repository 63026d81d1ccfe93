"""Splitting a ReLU layer into affine pieces.

A ReLU layer is affine on every region where the sign of each neuron's
pre-activation is fixed. ``layer_reach`` finds those regions for a given
input polytope and reports, for each one, the map ``y = C x + d`` that the
layer computes there.
"""
import numpy as np

from relureach import AffinePiece, Layer, Polytope, layer_reach, output_set, vertices

# A scalar ReLU on [-1, 1]: one piece where the neuron is off, one where it is on.
interval = Polytope.from_bounds([-1.0], [1.0])
for piece in layer_reach([AffinePiece.identity(interval)], Layer([[1.0]], [0.0])):
    lo, hi = vertices(piece.domain).ravel()[[0, -1]]
    print(f"pattern {piece.pattern[0]}  domain [{lo:+.1f}, {hi:+.1f}]  y = {piece.C[0, 0]:.0f} x + {piece.d[0]:.0f}")

# Two neurons with identity weights on the square [-1, 1]^2 give four patterns.
square = Polytope.box([0.0, 0.0], 1.0)
pieces = layer_reach([AffinePiece.identity(square)], Layer(np.eye(2), np.zeros(2)))
print(f"\n{len(pieces)} pieces on the square")
for piece in pieces:
    print(piece.pattern[0], "domain corners", vertices(piece.domain).tolist())

# The union of the piece images is the ReLU image of the square, i.e. [0, 1]^2.
images = output_set(pieces)
corners = np.vstack([vertices(P) for P in images])
print("\nimage bounding box:", corners.min(axis=0), corners.max(axis=0))

# A tilted layer: neuron boundaries cut the square along oblique lines.
tilted = Layer([[1.0, 1.0], [1.0, -1.0], [-0.5, 1.0]], [0.2, 0.0, -0.3])
pieces = layer_reach([AffinePiece.identity(square)], tilted)
print(f"\ntilted layer: {len(pieces)} non-empty patterns out of {2 ** 3}")
for piece in pieces:
    print(piece.pattern[0], f"{len(vertices(piece.domain))} corners")
