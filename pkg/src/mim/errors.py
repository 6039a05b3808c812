"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "AccuracyError",
    "DegenerateDataError",
    "NonMonotonePivotError",
    "SearchError",
]


class AccuracyError(RuntimeError):
    """A series or quadrature routine could not meet its accuracy target.

    The best available value is attached as ``partial`` together with the
    achieved error bound, so callers can decide whether the result is still
    usable for their purpose.
    """

    def __init__(self, message: str, partial=None, error_bound: float | None = None):
        super().__init__(message)
        self.partial = partial
        self.error_bound = error_bound


class DegenerateDataError(ValueError):
    """The data carry no information for the requested inference.

    Raised for things like a zero sample standard deviation with n >= 2, or a
    constant sample when a spread estimate is required.
    """


class NonMonotonePivotError(ValueError):
    """An operation that requires a monotone scalar pivot received one that
    is not monotone in the interest parameter."""


class SearchError(RuntimeError):
    """A bracketing search failed; carries the last bracket examined."""

    def __init__(self, message: str, bracket: tuple | None = None):
        super().__init__(message)
        self.bracket = bracket
