# UTILS: Exception hierarchy shared by all modules
"""
Errors raised by the toolkit. Preconditions are ValueErrors so callers
that only know the standard library still catch them.
"""


class PreconditionError(ValueError):
    """A parameter violates the precondition of the operation it was passed to"""

    def __init__(self, parameter: str, condition: str, value=None):
        self.parameter = parameter
        self.condition = condition
        self.value = value
        detail = f" (got {value!r})" if value is not None else ""
        super().__init__(f"{parameter}: expected {condition}{detail}")


class GridMismatchError(PreconditionError):
    """Two sampled functions live on different grids"""

    def __init__(self, left, right):
        super().__init__("grid", f"matching grids, {left} vs {right}")


class NonFiniteSampleError(PreconditionError):
    """Sampling produced NaN or Inf at a grid node"""

    def __init__(self, index, point, value):
        self.index = index
        self.point = point
        super().__init__("f", f"finite value at node {index} x={point}", value)


class BracketError(RuntimeError):
    """The epsilon grid does not straddle the solvability threshold"""


class NotConvergedError(RuntimeError):
    """An operation needs a converged trajectory"""


class ArtifactWriteError(OSError):
    """Writing a CSV or figure artifact failed"""
