class SuperintError(Exception):
    pass


class DomainError(SuperintError, ValueError):
    """
    Raised when an operation is called outside its preconditions: too few
    particles, mismatched vector lengths, non-finite coordinates.
    """

    pass


class SingularChartError(DomainError):
    """
    The point lies on a locus where the chart is not defined, e.g. on the
    axis of a cylindrical chart or at a pole of a hyperspherical one.
    """

    pass


class SingularityError(SuperintError):
    """
    A denominator of a potential fell below the collision guard. We raise
    instead of returning infinities so that sampling and integration can
    tell a collision apart from a large but finite value.
    """

    def __init__(self, denominator, value, guard=None):
        self.denominator = denominator
        self.value = value
        self.guard = guard
        message = "Denominator %s = %.3e is below the collision guard" % (denominator, value)
        if guard is not None:
            message += " %.1e" % guard
        super().__init__(message)


class ChartMismatchError(SuperintError):
    pass


class SamplingExhausted(SuperintError):
    pass


class ConfigError(SuperintError):
    def __init__(self, message, errors=None):
        self.errors = errors or {}
        super().__init__(message)
