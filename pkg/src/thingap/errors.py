"""Exception hierarchy shared by all modules."""


class ThinGapError(Exception):
    """Base class for every error raised by this package."""


class ChartExceeded(ThinGapError, ValueError):
    pass


class DegeneratePatch(ThinGapError, ValueError):
    pass


class SigmaOutOfRange(ThinGapError, ValueError):
    pass


class GapExceedsDiameter(ThinGapError, ValueError):
    pass


class StepUnderflow(ThinGapError, ValueError):
    pass


class StencilClipped(ThinGapError, ValueError):
    pass


class DefectExceeded(ThinGapError, RuntimeError):
    pass


class NonFinite(ThinGapError, FloatingPointError):
    pass


class FrameViolation(ThinGapError, ValueError):
    pass


class WindowViolation(ThinGapError, ValueError):
    pass


class NonPositiveValue(ThinGapError, ValueError):
    pass


class InsufficientPoints(ThinGapError, ValueError):
    pass


class LengthMismatch(ThinGapError, ValueError):
    pass


class AlphaOutOfRange(ThinGapError, ValueError):
    pass


class FloorReached(ThinGapError, RuntimeError):
    """Raised only on request; the envelope integrator normally reports it."""


class ConfigInvalid(ThinGapError, ValueError):
    pass


class CheckFailed(ThinGapError, RuntimeError):
    pass


class NoReports(ThinGapError, ValueError):
    pass


class IoFailure(ThinGapError, OSError):
    pass
