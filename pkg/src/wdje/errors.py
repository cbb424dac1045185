"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user input: malformed files, out-of-range values, shape mismatches."""


class NumericalError(RuntimeError):
    """A solver failed numerically (NaN scalings, pivot-limit overrun, ...)."""
