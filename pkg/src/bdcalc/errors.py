"""Exception hierarchy shared by every module."""


class BdError(Exception):
    """Base class for all errors raised by bdcalc."""


class DomainError(BdError, ValueError):
    """A metric value lies outside the domain of its transform."""


class DegenerateInput(BdError, ValueError):
    """Knots are not strictly increasing or too few points were given."""


class OutOfDomain(BdError, ValueError):
    """Evaluation or integration requested outside the fitted knot range."""


class NoOverlap(BdError, ValueError):
    """The independent-value ranges of two curves do not overlap."""


class ValidationFailed(BdError, ValueError):
    """A support set carries error-level validation findings."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class EmptyInput(BdError, ValueError):
    pass


class NotASubset(BdError, ValueError):
    pass


class InvalidCount(BdError, ValueError):
    pass


class ParseError(BdError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateKey(BdError, ValueError):
    pass


class ConfigError(BdError, ValueError):
    pass
