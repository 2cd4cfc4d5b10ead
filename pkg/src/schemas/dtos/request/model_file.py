# src/schemas/dtos/request/model_file.py
from typing import Any, Dict, List, Optional, Union

from pydantic import Field, field_validator

from src.schemas.base_schema import BaseSchema
from src.schemas.enums.solver_enums import ConstraintKindEnum

NodeId = Union[str, int]


class VariableSpec(BaseSchema):
    """节点变量；缺省的界表示无界"""
    name: str
    lower: Optional[float] = None
    upper: Optional[float] = None
    init: float = 0.0


class ConstraintSpec(BaseSchema):
    """约束：expr 为 s-表达式，bounds 为 {kind: equality, rhs} 或 {kind: inequality, lo, hi}"""
    expr: Any
    bounds: Dict[str, Any] = Field(default_factory=lambda: {"kind": "equality", "rhs": 0.0})
    name: Optional[str] = None

    @field_validator("bounds")
    @classmethod
    def known_kind(cls, v):
        if not ConstraintKindEnum.has_value(v.get("kind", ConstraintKindEnum.EQUALITY.value)):
            raise ValueError(f"unknown constraint kind '{v.get('kind')}'")
        return v


class NodeSpec(BaseSchema):
    id: NodeId
    variables: List[VariableSpec] = Field(default_factory=list)
    constraints: List[ConstraintSpec] = Field(default_factory=list)
    objective: Any = 0.0


class GraphSpec(BaseSchema):
    name: str = "graph"
    nodes: List[NodeSpec] = Field(default_factory=list)
    links: List[ConstraintSpec] = Field(default_factory=list)
    subgraphs: List["GraphSpec"] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)


class ModelFile(GraphSpec):
    """模型交换 JSON 文档（顶层图）"""
    format_version: int = Field(1, ge=1)


GraphSpec.model_rebuild()
ModelFile.model_rebuild()
