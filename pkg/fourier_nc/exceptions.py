"""
Domain errors raised by the Fourier-NC services
The CLI maps them onto exit statuses (1 = input error, 2 = contract violation)
"""
from typing import Any, Optional, Tuple


class FourierNCError(Exception):
    """Root of every error raised by the laboratory"""

    exit_status = 1


class InstanceValidationError(FourierNCError, ValueError):
    """Instance document or domain object violates an invariant"""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UsageError(FourierNCError, ValueError):
    """Parameter outside an operation's precondition"""


class DomainMismatchError(FourierNCError, ValueError):
    """Assignment, cost or operation does not match the instance group"""


class UnsupportedGroupError(FourierNCError, ValueError):
    """Group descriptor not handled by the requested operation"""


class GuardExceededError(FourierNCError):
    """Exhaustive search would exceed its configured guard"""

    exit_status = 2


class DisconnectedGraphError(FourierNCError, ValueError):
    """Operation needs a connected graph"""


class LinearisationError(FourierNCError, ValueError):
    """Phase scaling too small for the first-order measurement model"""


class CorruptBatchError(FourierNCError, ValueError):
    """Measurement batch refers to a mode the instance does not have"""


class FrustrationError(FourierNCError):
    """Edge minimisers cannot be realised simultaneously"""

    exit_status = 2

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message)


class AmbiguousCongruenceError(FourierNCError):
    """A tree edge still has more than one admissible offset difference"""

    exit_status = 2

    def __init__(self, message: str, edge: Optional[Tuple[int, int]] = None):
        self.edge = edge
        super().__init__(message)


class SamplingBudgetError(FourierNCError):
    """Sampling stopped before every required mode was observed"""

    exit_status = 2

    def __init__(self, message: str, missing: Tuple = (), missing_mass: float = 0.0):
        self.missing = missing
        self.missing_mass = missing_mass
        super().__init__(message)
