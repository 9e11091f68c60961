"""Exception hierarchy shared by all diffmap modules."""


class DiffmapError(Exception):
    """Base class for validation errors raised by the library."""


class IsolatedPointError(DiffmapError):
    def __init__(self, index):
        self.index = int(index)
        super().__init__(f"point {self.index} has zero degree after sparsification")


class DegenerateDegreeError(DiffmapError):
    pass


class ZeroScaleError(DiffmapError):
    pass


class ReducibleGraphError(DiffmapError):
    pass


class SolverError(DiffmapError):
    pass


class DimensionError(DiffmapError):
    pass


class UndefinedRatioError(DiffmapError):
    pass


class NegativeEigenvalueError(DiffmapError):
    """Raised when a non-integer time is combined with a negative eigenvalue."""


class InsufficientSpectrumError(DiffmapError):
    pass


class DegenerateClusterError(DiffmapError):
    pass


class GridError(DiffmapError):
    pass


class RangeError(DiffmapError):
    pass


class StepSizeError(DiffmapError):
    pass


class GeometryError(DiffmapError):
    pass


class ParseError(DiffmapError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class TruncatedSampleWarning(UserWarning):
    """Some exit-time trajectories hit ``max_steps`` before exiting."""


class TruncationWarning(UserWarning):
    """A transition probability was reconstructed from a partial eigenbasis."""
