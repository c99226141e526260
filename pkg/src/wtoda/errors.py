"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: config errors exit 2, precondition
refusals exit 3, tolerance failures exit 4.
"""


class WtodaError(Exception):
    """Base class for package errors."""


class InvalidArgument(WtodaError, ValueError):
    """Malformed or out-of-domain argument (dimension mismatch, n < 2, ...)."""


class PreconditionError(WtodaError):
    """Mathematically valid input outside an operation's stated precondition.

    Examples: spectral parameter outside the absolute-convergence region,
    non-generic character, degenerate (Weyl-fixed) transform parameter.
    """


class ToleranceError(WtodaError):
    """A computation finished but missed its accuracy contract."""


class ConfigError(WtodaError):
    """Run configuration violates the published schema."""
