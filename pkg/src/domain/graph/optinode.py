# src/domain/graph/optinode.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, FrozenSet, Hashable, List, Optional

from src.domain.exceptions.graph_exceptions import CrossNodeExpression, UnknownVariable
from src.domain.exceptions.validation_exception import ConfigError
from src.domain.expressions.expression import Expression, VariableRef, as_expression
from src.schemas.enums.solver_enums import ConstraintKindEnum

if TYPE_CHECKING:
    from src.domain.graph.optigraph import OptiGraph


@dataclass(frozen=True)
class ConstraintBounds:
    """约束类型：等式 expr = rhs，或不等式 lo ≤ expr ≤ hi"""
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise ConfigError("constraint bounds", f"lower {self.lo} exceeds upper {self.hi}")

    @classmethod
    def equality(cls, rhs: float = 0.0) -> "ConstraintBounds":
        return cls(float(rhs), float(rhs))

    @classmethod
    def inequality(cls, lo: float = -math.inf, hi: float = math.inf) -> "ConstraintBounds":
        return cls(float(lo), float(hi))

    @property
    def is_equality(self) -> bool:
        return self.lo == self.hi

    def to_dict(self) -> Dict[str, Any]:
        if self.is_equality:
            return {"kind": ConstraintKindEnum.EQUALITY.value, "rhs": self.lo}
        return {"kind": ConstraintKindEnum.INEQUALITY.value, "lo": _encode_bound(self.lo), "hi": _encode_bound(self.hi)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConstraintBounds":
        if data.get("kind", ConstraintKindEnum.EQUALITY.value) == ConstraintKindEnum.EQUALITY.value:
            return cls.equality(float(data.get("rhs", 0.0)))
        return cls.inequality(_decode_bound(data.get("lo")), _decode_bound(data.get("hi")))


def _encode_bound(value: float) -> Optional[float]:
    return None if math.isinf(value) else value


def _decode_bound(value: Optional[float], default: float = math.inf) -> float:
    return default if value is None else float(value)


@dataclass
class VariableInfo:
    """节点变量"""
    name: str
    lower: float = -math.inf
    upper: float = math.inf
    init: float = 0.0


@dataclass(frozen=True)
class NodeConstraint:
    """节点内部约束"""
    expr: Expression
    bounds: ConstraintBounds
    name: Optional[str] = None


@dataclass(frozen=True)
class LinkConstraint:
    """链接约束（超边）"""
    expr: Expression
    bounds: ConstraintBounds
    support: FrozenSet[Hashable] = field(default_factory=frozenset)
    name: Optional[str] = None


class OptiNode:
    """图节点：变量、内部约束、目标函数"""

    def __init__(self, node_id: Hashable, graph: Optional["OptiGraph"] = None):
        self.id = node_id
        self.graph = graph
        self.variables: List[VariableInfo] = []
        self.constraints: List[NodeConstraint] = []
        self.objective: Expression = Expression.constant(0.0)
        self._by_name: Dict[str, int] = {}

    # ---- 构造 ----
    def add_variable(
        self,
        name: Optional[str] = None,
        lower: float = -math.inf,
        upper: float = math.inf,
        init: float = 0.0,
    ) -> VariableRef:
        """添加变量，局部索引按添加顺序递增"""
        index = len(self.variables)
        name = name if name is not None else f"x{index}"
        lower, upper = float(lower), float(upper)
        if math.isnan(lower) or math.isnan(upper) or lower > upper:
            raise ConfigError(f"{self.id}.{name}", f"lower bound {lower} exceeds upper bound {upper}")
        if name in self._by_name:
            raise ConfigError(f"{self.id}.{name}", "variable name already used on this node")
        self.variables.append(VariableInfo(name, lower, upper, float(init)))
        self._by_name[name] = index
        return VariableRef(self.id, index)

    def add_constraint(
        self,
        expr: Any,
        kind: Optional[ConstraintBounds] = None,
        name: Optional[str] = None,
    ) -> NodeConstraint:
        expr = as_expression(expr)
        self._check_local(expr)
        constraint = NodeConstraint(expr, kind or ConstraintBounds.equality(), name)
        self.constraints.append(constraint)
        return constraint

    def set_objective(self, expr: Any) -> None:
        expr = as_expression(expr)
        self._check_local(expr)
        self.objective = expr

    def _check_local(self, expr: Expression) -> None:
        refs = expr.variables()
        foreign = {r.node_id for r in refs if r.node_id != self.id}
        if foreign:
            raise CrossNodeExpression(self.id, foreign)
        for ref in refs:
            self.check_variable(ref.local_index)

    def check_variable(self, local_index: int) -> None:
        if not 0 <= local_index < len(self.variables):
            raise UnknownVariable(self.id, local_index, len(self.variables))

    # ---- 查询 ----
    def __getitem__(self, name: str) -> VariableRef:
        return VariableRef(self.id, self._by_name[name])

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def __repr__(self) -> str:
        return f"OptiNode({self.id!r}, vars={self.num_variables}, cons={self.num_constraints})"
