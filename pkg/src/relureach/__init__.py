"""Reachability and safety verification for switched linear systems with ReLU controllers."""
from .exceptions import (DimensionError, EmptyPolytopeError, ModelError, PieceCapExceeded, ReachError,
                         SolverError, UnboundedPolytopeError)
from .geometry import (PolyUnion, Polytope, affine_image, contains_point, convex_hull, hull_of_union,
                       intersect, is_empty, minkowski_sum, remove_redundant, vertices)
from .lp import LpOutcome, LpStatus, lp_feasible, lp_optimize
from .model import ModelBundle, bundled_model_path, load_model
from .network import (AffinePiece, Layer, ReluNetwork, eval_network, layer_reach, linear_layer_reach,
                      network_reach, output_set)
from .system import PwlSystem, ReachResult, SwitchingSignal, closed_loop_step, eval_step, reach_interval
from .verify import (SafetySpec, SafetyVerdict, check_safety, simulate, simulate_grid,
                     validate_containment)

__version__ = "0.1.0"
