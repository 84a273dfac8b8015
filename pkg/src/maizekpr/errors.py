"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all maizekpr errors."""


class SumMismatchError(EngineError):
    """RLE counts do not sum to width * height."""


class ContractError(EngineError):
    """A candidate or contract file violates the mask-contract schema."""


class DegenerateBoxError(EngineError):
    """Bounding box has non-positive width or height."""


class DimensionMismatchError(EngineError):
    """Two masks do not share the same dimensions."""


class TooFewKernelsError(EngineError):
    """Not enough kernels for graph construction or endpoint selection."""


class NoPathError(EngineError):
    """The row graph has no path between the selected endpoints."""


class NoEarsFoundError(EngineError):
    """Scene segmentation produced no component that passes the ear filters."""


class OutOfRangeError(EngineError):
    """Query coordinate falls outside the polyline's vertical span."""


class SpecInfeasibleError(EngineError):
    """Synthetic ear spec cannot satisfy the mask-overlap constraint."""


class LayoutOverlapError(EngineError):
    """Scene layout slots overlap."""


class EmptyInputError(EngineError):
    """Operation requires at least one input value."""


class NonPositiveTruthError(EngineError):
    """Ground-truth values must be strictly positive for ratio metrics."""


class DegenerateVarianceError(EngineError):
    """Truth values have no variance, so R^2 is undefined."""


class IdMismatchError(EngineError):
    """Prediction and annotation refer to different ears."""
