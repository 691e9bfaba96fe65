"""Exception types raised across the package."""


class ScatterTopoError(ValueError):
    """Base class for all precondition violations."""


class PreconditionError(ScatterTopoError):
    """A parameter or input violates an operation's precondition."""


class GridMismatchError(ScatterTopoError):
    """Two objects that must share a grid live on different grids."""
