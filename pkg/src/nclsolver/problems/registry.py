"""
Instance registry - named builders grouped by family, with known optima and expected outcomes
"""

import inspect
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..core.exceptions import InvalidSizeError, UnknownInstanceError
from ..model import NcoProblem

logger = logging.getLogger(__name__)


class Family(Enum):
    """Behavior class an instance exercises"""

    REGULAR = "regular"
    DEGENERATE_LICQ = "degenerate-licq"
    MPCC = "mpcc"
    INFEASIBLE = "infeasible"
    NONCONVEX_QP = "nonconvex-qp"
    OPF_TOY = "opf-toy"


@dataclass(frozen=True)
class KnownOptimum:
    """Optimal objective with the tolerance a solve must reach, and where the number comes from"""

    value: float
    tolerance: float
    provenance: str
    point: Optional[Tuple[float, ...]] = None


OptimumRule = Callable[..., Optional[KnownOptimum]]


@dataclass(frozen=True)
class InstanceSpec:
    """A registered instance: builder, default size parameters and expectations"""

    name: str
    family: Family
    builder: Callable[..., NcoProblem]
    description: str
    expected_status: str = "optimal"
    optimum: Optional[OptimumRule] = None
    defaults: Dict[str, Any] = field(default_factory=dict)

    def resolve(self, params: Dict[str, Any]) -> Dict[str, Any]:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise InvalidSizeError(
                f"Instance {self.name} has no parameter(s) {sorted(unknown)}; "
                f"accepted: {sorted(self.defaults) or 'none'}"
            )
        return {**self.defaults, **params}

    def build(self, **params: Any) -> NcoProblem:
        return self.builder(**self.resolve(params))

    def known_optimum(self, **params: Any) -> Optional[KnownOptimum]:
        if self.optimum is None:
            return None
        return self.optimum(**self.resolve(params))

    def reference(self, **params: Any) -> str:
        """Canonical reference string, e.g. ncvxqp(n=20, m=8, seed=0)"""
        resolved = self.resolve(params)
        if not resolved:
            return self.name
        args = ", ".join(f"{k}={v}" for k, v in resolved.items())
        return f"{self.name}({args})"


INSTANCE_REGISTRY: Dict[str, InstanceSpec] = {}


def register(
    name: str,
    family: Family,
    description: str,
    expected_status: str = "optimal",
    optimum: Optional[OptimumRule] = None,
) -> Callable[[Callable[..., NcoProblem]], Callable[..., NcoProblem]]:
    """Decorator adding a builder to the registry; keyword defaults become size parameters"""

    def decorator(builder: Callable[..., NcoProblem]) -> Callable[..., NcoProblem]:
        if name in INSTANCE_REGISTRY:
            raise ValueError(f"Instance {name} registered twice")
        defaults = {
            p.name: p.default
            for p in inspect.signature(builder).parameters.values()
            if p.default is not inspect.Parameter.empty
        }
        INSTANCE_REGISTRY[name] = InstanceSpec(
            name=name,
            family=family,
            builder=builder,
            description=description,
            expected_status=expected_status,
            optimum=optimum,
            defaults=defaults,
        )
        return builder

    return decorator


def constant_optimum(
    value: float, tolerance: float = 1e-6, provenance: str = "analytic", point: Optional[Tuple[float, ...]] = None
) -> OptimumRule:
    known = KnownOptimum(value, tolerance, provenance, point)
    return lambda **_: known


_REF_PATTERN = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*(?:\((.*)\))?\s*$")


def _parse_value(text: str) -> Any:
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_instance_ref(ref: str) -> Tuple[str, Dict[str, Any]]:
    """Split 'name(key=value, ...)' into the name and a parameter dict"""
    match = _REF_PATTERN.match(ref)
    if not match:
        raise UnknownInstanceError(f"Malformed instance reference '{ref}'")
    name, arglist = match.group(1), match.group(2)
    params: Dict[str, Any] = {}
    if arglist and arglist.strip():
        for item in arglist.split(","):
            if "=" not in item:
                raise InvalidSizeError(f"Instance parameter '{item.strip()}' must be written key=value")
            key, value = item.split("=", 1)
            params[key.strip()] = _parse_value(value)
    return name, params


def get_instance(name: str) -> InstanceSpec:
    if name not in INSTANCE_REGISTRY:
        raise UnknownInstanceError(f"Unknown instance '{name}' (run 'nclsolver list' for the registry)")
    return INSTANCE_REGISTRY[name]


def build(name: str, **params: Any) -> NcoProblem:
    """Build a registered instance from a name or a 'name(key=value)' reference"""
    base, ref_params = parse_instance_ref(name)
    spec = get_instance(base)
    problem = spec.build(**{**ref_params, **params})
    logger.debug(f"Built instance {spec.reference(**{**ref_params, **params})}")
    return problem


def list_instances(family: Optional[str] = None) -> List[InstanceSpec]:
    """Registered instances sorted by name, optionally restricted to one family tag"""
    specs = sorted(INSTANCE_REGISTRY.values(), key=lambda s: s.name)
    if family is not None:
        wanted = Family(family)
        specs = [s for s in specs if s.family is wanted]
    return specs


def check_positive(name: str, **sizes: Any) -> None:
    for key, value in sizes.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise InvalidSizeError(f"{name}: parameter {key} must be a positive integer, got {value!r}")
