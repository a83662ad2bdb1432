"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: configuration problems exit 2,
numerical failures exit 3.
"""


class DimLDAError(Exception):
    """Base class for all package errors."""


class ValidationError(DimLDAError, ValueError):
    """A domain object violates one of its invariants."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        msg = invariant if not detail else f"{invariant} ({detail})"
        super().__init__(msg)


class DomainError(DimLDAError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class NumericalError(DimLDAError, ArithmeticError):
    """A numerical routine failed to converge or hit a degenerate value."""

    def __init__(self, msg: str, value: float | None = None):
        self.value = value
        if value is not None:
            msg = f"{msg} (value={value!r})"
        super().__init__(msg)


class SingularityError(NumericalError):
    """The pooled covariance is singular for the requested classifier."""


class ConfigError(DimLDAError, ValueError):
    """Malformed or inconsistent configuration."""
