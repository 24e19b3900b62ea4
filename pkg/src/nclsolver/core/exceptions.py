"""
Exception hierarchy for the NCL solver
"""

from typing import Optional


class NclError(Exception):
    """Base class for every error raised by nclsolver"""


class DimensionError(NclError, ValueError):
    """A vector or matrix does not have the expected length or shape"""


class UnknownInstanceError(NclError, KeyError):
    """A registry lookup used a name that is not registered"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown instance"


class InvalidSizeError(NclError, ValueError):
    """Size parameters passed to an instance builder are out of range"""


class InstanceParseError(NclError, ValueError):
    """An instance file could not be parsed; carries the offending field and line if known"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class UnsupportedOperatorError(InstanceParseError):
    """A prefix expression used an operator the expression graph does not support"""


class NonInteriorIterateError(NclError, ValueError):
    """An iterate violates strict interiority with respect to its bounds or bound multipliers"""


class FactorizationError(NclError):
    """The LDL^T factorization produced a non-finite value or met a zero pivot with pivot_eps = 0"""


class StepFailure(NclError):
    """Inertia correction could not produce an acceptable Newton step below delta_max"""

    def __init__(self, message: str, delta: float = 0.0, attempts: int = 0):
        self.delta = delta
        self.attempts = attempts
        super().__init__(message)
