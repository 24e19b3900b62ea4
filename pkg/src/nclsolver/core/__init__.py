"""
Core Module - Configuration and Error Types

Contains the environment-driven configuration and the exception hierarchy shared by all modules.
"""

from .config import config, Config
from .exceptions import (
    NclError,
    DimensionError,
    UnknownInstanceError,
    InvalidSizeError,
    InstanceParseError,
    UnsupportedOperatorError,
    NonInteriorIterateError,
    FactorizationError,
    StepFailure,
)

__all__ = [
    "config",
    "Config",
    "NclError",
    "DimensionError",
    "UnknownInstanceError",
    "InvalidSizeError",
    "InstanceParseError",
    "UnsupportedOperatorError",
    "NonInteriorIterateError",
    "FactorizationError",
    "StepFailure",
]
