"""
Problems Module - Built-in Instance Library and Instance Files

Importing the package registers every family; instances are built by name or by a
'name(key=value, ...)' reference.
"""

from .registry import (
    INSTANCE_REGISTRY,
    Family,
    InstanceSpec,
    KnownOptimum,
    build,
    get_instance,
    list_instances,
    parse_instance_ref,
)
from . import regular, degenerate, mpcc, infeasible, nonconvex_qp, opf  # noqa: F401  (registration)
from .loader import InstanceFile, load_instance, parse_expression, parse_instance

__all__ = [
    "INSTANCE_REGISTRY",
    "Family",
    "InstanceSpec",
    "KnownOptimum",
    "build",
    "get_instance",
    "list_instances",
    "parse_instance_ref",
    "InstanceFile",
    "load_instance",
    "parse_expression",
    "parse_instance",
]
