"""Exception hierarchy shared by all modules."""


class EclipseDetectError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(EclipseDetectError, ValueError):
    pass


class InvalidDegree(EclipseDetectError, ValueError):
    pass


class InvalidScenario(EclipseDetectError, ValueError):
    pass


class InvalidSnr(EclipseDetectError, ValueError):
    pass


class InvalidEpsilon(EclipseDetectError, ValueError):
    pass


class InvalidParameters(EclipseDetectError, ValueError):
    pass


class DistortionNotAchieved(EclipseDetectError, RuntimeError):
    """No sampled projection met the requested distortion bound."""


class EmptySegment(EclipseDetectError, ValueError):
    pass


class WindowEmpty(EclipseDetectError, ValueError):
    """The trimming parameter leaves no admissible split point."""


class DegenerateVariance(EclipseDetectError, ArithmeticError):
    """Pooled variance of squared distances is numerically zero."""


class DatasetFormatError(EclipseDetectError, ValueError):
    pass
