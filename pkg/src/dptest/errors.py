"""Exception types shared across the package."""


class DPTestError(Exception):
    """Base class for every error raised by dptest."""


class InvalidArgument(DPTestError, ValueError):
    pass


class UnsupportedSize(DPTestError):
    """The instance is too large for the requested exact method."""


class InvalidGraph(DPTestError):
    pass


class EmptyLocalView(DPTestError):
    """A coordinate is contained in no set of the domain."""


class FormulaNotApplicable(DPTestError):
    pass


class NumericFailure(DPTestError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RetryExhausted(DPTestError):
    pass
