"""Exceptions shared across the package.

ValidationError maps to CLI exit code 2, NumericalFailure to exit code 3.
"""


class ValidationError(ValueError):
    """Bad configuration or arguments (rejected before any computation)."""


class NumericalFailure(RuntimeError):
    """Numerical quality gate violated (conservation drift, indeterminate slope)."""
