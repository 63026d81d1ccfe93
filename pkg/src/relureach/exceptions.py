"""Exception hierarchy shared by all relureach modules."""


class ReachError(Exception):
    """Base class for errors raised by relureach."""


class DimensionError(ReachError, ValueError):
    """Operands have incompatible shapes."""


class SolverError(ReachError, RuntimeError):
    """The LP solver did not terminate within its iteration cap."""


class EmptyPolytopeError(ReachError, ValueError):
    pass


class UnboundedPolytopeError(ReachError, ValueError):
    pass


class PieceCapExceeded(ReachError, RuntimeError):
    """Exact enumeration produced more affine pieces than allowed.

    Switch to hull mode or raise the cap (``NNREACH_PIECE_CAP``).
    """


class ModelError(ReachError, ValueError):
    """A model file is malformed or dimensionally inconsistent."""
