"""Exception types raised across the package."""

from __future__ import annotations


class BeurlingError(Exception):
    """Base class for all package errors."""


class InvalidInputError(BeurlingError, ValueError):
    pass


class DimensionMismatchError(InvalidInputError):
    pass


class PreconditionError(BeurlingError, ValueError):
    pass


class EstimateError(PreconditionError):
    """Raised when an exact growth index is required but only a window estimate exists."""


class WindowError(BeurlingError):
    """A table weight was queried outside of its window.

    ``clipped_value`` carries the quantity computed over the part that was
    inside the window, when the caller had one to offer.
    """

    def __init__(self, message, clipped_value=None):
        super().__init__(message)
        self.clipped_value = clipped_value


class PoleError(BeurlingError, ZeroDivisionError):
    pass


class NotInvertibleOnCircle(BeurlingError):
    def __init__(self, node, margin, epsilon):
        super().__init__(
            f"symbol not invertible on the unit circle: sigma_min={margin:.3e} < {epsilon:.3e} "
            f"at z={node.real:+.6f}{node.imag:+.6f}j"
        )
        self.node = node
        self.margin = margin
        self.epsilon = epsilon


class NotInvertibleOnLine(BeurlingError):
    def __init__(self, frequency, margin, epsilon):
        super().__init__(
            f"e + f^(it) not invertible: sigma_min={margin:.3e} < {epsilon:.3e} at t={frequency:+.6f}"
        )
        self.frequency = frequency
        self.margin = margin
        self.epsilon = epsilon


class SingularOperatorError(BeurlingError):
    def __init__(self, condition):
        super().__init__(f"finite section is numerically singular (condition estimate {condition:.3e})")
        self.condition = condition
