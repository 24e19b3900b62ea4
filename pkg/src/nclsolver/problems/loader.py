"""
Instance files - JSON documents validated with pydantic, expressions in prefix notation

    {
      "name": "hs6",
      "variables": [{"name": "t1", "start": -1.2}, {"name": "t2", "start": 1.0}],
      "objective": "(^ (- 1 t1) 2)",
      "constraints": [{"expression": "(* 10 (- t2 (^ t1 2)))", "lower": 0, "upper": 0}]
    }

A constraint whose lower and upper values are equal becomes an equality; everything else is a
range inequality. Missing bounds mean infinite.
"""

import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.exceptions import InstanceParseError, UnsupportedOperatorError
from ..model import Expr, ModelBuilder, NcoProblem, cos, exp, inv, log, quicksum, sin, sqrt

logger = logging.getLogger(__name__)


class VariableSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    lower: Optional[float] = None
    upper: Optional[float] = None
    start: Optional[float] = None

    @field_validator("name")
    @classmethod
    def name_is_symbol(cls, value: str) -> str:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_\.\[\]]*", value):
            raise ValueError(f"'{value}' is not a valid variable name")
        return value

    @model_validator(mode="after")
    def bounds_ordered(self) -> "VariableSpec":
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        return self


class ConstraintSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    expression: str = Field(min_length=1)
    lower: Optional[float] = None
    upper: Optional[float] = None

    @model_validator(mode="after")
    def range_ordered(self) -> "ConstraintSpec":
        if self.lower is None and self.upper is None:
            raise ValueError("a constraint needs a lower or an upper value")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f"lower value {self.lower} exceeds upper value {self.upper}")
        return self

    @property
    def is_equality(self) -> bool:
        return self.lower is not None and self.lower == self.upper


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "instance"
    variables: List[VariableSpec] = Field(min_length=1)
    objective: str = "0"
    constraints: List[ConstraintSpec] = Field(default_factory=list)

    @field_validator("variables")
    @classmethod
    def names_unique(cls, value: List[VariableSpec]) -> List[VariableSpec]:
        seen = set()
        for var in value:
            if var.name in seen:
                raise ValueError(f"variable '{var.name}' declared twice")
            seen.add(var.name)
        return value


# Prefix expressions

_TOKEN = re.compile(r"\(|\)|[^\s()]+")

Node = Union[str, List["Node"]]


def _nary_sub(args: Sequence[Expr]) -> Expr:
    if len(args) == 1:
        return -args[0]
    return args[0] - quicksum(args[1:])


def _product(args: Sequence[Expr]) -> Expr:
    result = args[0]
    for arg in args[1:]:
        result = result * arg
    return result


OPERATORS: Dict[str, Tuple[int, Optional[int], Callable[[Sequence[Expr]], Expr]]] = {
    "+": (1, None, lambda a: quicksum(a)),
    "-": (1, None, _nary_sub),
    "*": (1, None, _product),
    "/": (2, 2, lambda a: a[0] / a[1]),
    "^": (2, 2, lambda a: a[0] ** a[1]),
    "neg": (1, 1, lambda a: -a[0]),
    "inv": (1, 1, lambda a: inv(a[0])),
    "sin": (1, 1, lambda a: sin(a[0])),
    "cos": (1, 1, lambda a: cos(a[0])),
    "exp": (1, 1, lambda a: exp(a[0])),
    "log": (1, 1, lambda a: log(a[0])),
    "sqrt": (1, 1, lambda a: sqrt(a[0])),
}


def _read_tree(text: str, field: str, line: Optional[int]) -> Node:
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise InstanceParseError("empty expression", field, line)
    stack: List[List[Node]] = [[]]
    for token in tokens:
        if token == "(":
            stack.append([])
        elif token == ")":
            if len(stack) == 1:
                raise InstanceParseError("unbalanced ')'", field, line)
            done = stack.pop()
            if not done:
                raise InstanceParseError("empty application '()'", field, line)
            stack[-1].append(done)
        else:
            stack[-1].append(token)
    if len(stack) != 1:
        raise InstanceParseError("unbalanced '('", field, line)
    if len(stack[0]) != 1:
        raise InstanceParseError("expected exactly one top-level expression", field, line)
    return stack[0][0]


def parse_expression(
    text: str, variables: Dict[str, Expr], field: str = "expression", line: Optional[int] = None
) -> Expr:
    """Turn a prefix expression such as '(* 10 (- t2 (^ t1 2)))' into an Expr"""

    def build(node: Node) -> Expr:
        if isinstance(node, str):
            if node in variables:
                return variables[node]
            try:
                value = float(node)
            except ValueError:
                raise InstanceParseError(f"unknown variable '{node}'", field, line) from None
            if not math.isfinite(value):
                raise InstanceParseError(f"non-finite constant '{node}'", field, line)
            return Expr.const(value)
        head, *rest = node
        if not isinstance(head, str):
            raise InstanceParseError("an application must start with an operator name", field, line)
        if head not in OPERATORS:
            raise UnsupportedOperatorError(f"unsupported operator '{head}'", field, line)
        lo, hi, apply = OPERATORS[head]
        if len(rest) < lo or (hi is not None and len(rest) > hi):
            expected = f"{lo}" if lo == hi else f"at least {lo}" if hi is None else f"{lo}..{hi}"
            raise InstanceParseError(f"operator '{head}' takes {expected} argument(s), got {len(rest)}", field, line)
        return apply([build(arg) for arg in rest])

    return build(_read_tree(text, field, line))


# Loading


def _line_of(text: str, loc: Sequence[Any]) -> Optional[int]:
    """Best-effort line of a JSON location path, following keys and list positions in order"""
    pos, index, found_any = 0, 0, False
    for part in loc:
        if isinstance(part, int):
            index = part
            continue
        for _ in range(index + 1):
            hit = text.find(f'"{part}"', pos)
            if hit < 0:
                return text.count("\n", 0, pos) + 1 if found_any else None
            pos = hit + 1
        found_any = True
        index = 0
    return text.count("\n", 0, pos) + 1 if found_any else None


def _field_name(loc: Sequence[Any]) -> str:
    name = ""
    for part in loc:
        name += f"[{part}]" if isinstance(part, int) else (f".{part}" if name else str(part))
    return name


def parse_instance(text: str, source: str = "<string>") -> NcoProblem:
    """Validate an instance document and build its NcoProblem"""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"{source}: invalid JSON ({e.msg})", line=e.lineno) from e

    try:
        doc = InstanceFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        loc = [p for p in first["loc"]]
        raise InstanceParseError(
            f"{source}: {first['msg']}", field=_field_name(loc) or None, line=_line_of(text, loc)
        ) from e

    mb = ModelBuilder(doc.name)
    symbols: Dict[str, Expr] = {}
    for var in doc.variables:
        symbols[var.name] = mb.add_variable(var.name, var.lower, var.upper, var.start)

    mb.minimize(parse_expression(doc.objective, symbols, "objective", _line_of(text, ["objective"])))
    for i, con in enumerate(doc.constraints):
        loc = ["constraints", i, "expression"]
        expr = parse_expression(con.expression, symbols, _field_name(loc), _line_of(text, loc))
        if con.is_equality:
            mb.add_equality(expr, rhs=float(con.lower))
        else:
            mb.add_inequality(expr, con.lower, con.upper)

    problem = mb.build()
    logger.info(f"Loaded instance {doc.name} from {source}")
    return problem


def load_instance(path: Union[str, Path]) -> NcoProblem:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceParseError(f"cannot read instance file {path}: {e.strerror or e}") from e
    return parse_instance(text, source=str(path))
