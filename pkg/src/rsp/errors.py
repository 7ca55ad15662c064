class RspError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(RspError, ValueError):
    pass


class ParameterError(RspError, ValueError):
    pass


class NumericError(RspError, ArithmeticError):
    """An iterative numerical method failed; ``iterations`` says how far it got."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations
