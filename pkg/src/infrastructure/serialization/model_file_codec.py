# src/infrastructure/serialization/model_file_codec.py
"""
OptiGraph ⇄ 模型交换 JSON

节点内表达式的变量写成 ["var", i]（局部索引），链接约束写成 ["var", 节点ID, i]。
界为无穷时写 null。
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Hashable, Union

from pydantic import ValidationError

from src.domain.exceptions.expression_exceptions import ExpressionFormatError
from src.domain.exceptions.validation_exception import ModelFileError
from src.domain.expressions.expression import VariableRef
from src.domain.expressions.sexpr import from_sexpr, to_sexpr
from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.optinode import ConstraintBounds
from src.infrastructure.logging.logger import get_logger
from src.schemas.dtos.request.model_file import ConstraintSpec, GraphSpec, ModelFile, NodeSpec, VariableSpec

logger = get_logger(__name__)


def _bound(value: float):
    return None if math.isinf(value) else value


# ---- 编码 ----
def _encode_graph(graph: OptiGraph, cls=GraphSpec) -> GraphSpec:
    nodes = []
    for node in graph.nodes:
        nodes.append(NodeSpec(
            id=node.id,
            variables=[VariableSpec(name=v.name, lower=_bound(v.lower), upper=_bound(v.upper), init=v.init)
                       for v in node.variables],
            constraints=[ConstraintSpec(expr=to_sexpr(c.expr, node.id), bounds=c.bounds.to_dict(), name=c.name)
                         for c in node.constraints],
            objective=to_sexpr(node.objective, node.id),
        ))
    links = [ConstraintSpec(expr=to_sexpr(link.expr), bounds=link.bounds.to_dict(), name=link.name)
             for link in graph.links]
    return cls(
        name=graph.name,
        nodes=nodes,
        links=links,
        subgraphs=[_encode_graph(sg) for sg in graph.subgraphs],
        metadata=dict(graph.metadata),
    )


def graph_to_model_file(graph: OptiGraph) -> ModelFile:
    return _encode_graph(graph, ModelFile)


# ---- 解码 ----
def _local_resolver(node_id: Hashable):
    def resolve(args: list) -> VariableRef:
        if len(args) == 1 and isinstance(args[0], int) and not isinstance(args[0], bool) and args[0] >= 0:
            return VariableRef(node_id, args[0])
        if len(args) == 2 and isinstance(args[1], int) and not isinstance(args[1], bool):
            return VariableRef(args[0], args[1])
        raise ExpressionFormatError("variable reference must be [\"var\", i] or [\"var\", node, i]", args)
    return resolve


def _link_resolver(args: list) -> VariableRef:
    if len(args) == 2 and isinstance(args[1], int) and not isinstance(args[1], bool):
        return VariableRef(args[0], args[1])
    raise ExpressionFormatError("link variables must be written [\"var\", node, i]", args)


def _build_nodes(spec: GraphSpec, graph: OptiGraph) -> None:
    """先建所有节点（含子图），链接约束引用的节点才可达"""
    for node_spec in spec.nodes:
        node = graph.add_node(node_spec.id)
        for v in node_spec.variables:
            node.add_variable(
                v.name,
                -math.inf if v.lower is None else v.lower,
                math.inf if v.upper is None else v.upper,
                v.init,
            )
        resolve = _local_resolver(node.id)
        for c in node_spec.constraints:
            node.add_constraint(from_sexpr(c.expr, resolve), ConstraintBounds.from_dict(c.bounds), c.name)
        node.set_objective(from_sexpr(node_spec.objective, resolve))
    for sub_spec in spec.subgraphs:
        sub = graph.add_subgraph(name=sub_spec.name)
        sub.metadata.update(sub_spec.metadata)
        _build_nodes(sub_spec, sub)


def _build_links(spec: GraphSpec, graph: OptiGraph) -> None:
    for c in spec.links:
        graph.link_constraint(from_sexpr(c.expr, _link_resolver), ConstraintBounds.from_dict(c.bounds), c.name)
    for sub_spec, sub in zip(spec.subgraphs, graph.subgraphs):
        _build_links(sub_spec, sub)


def model_file_to_graph(model: ModelFile) -> OptiGraph:
    graph = OptiGraph(model.name)
    graph.metadata.update(model.metadata)
    _build_nodes(model, graph)
    _build_links(model, graph)
    return graph


# ---- 文件 ----
def write_model_file(graph: OptiGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    model = graph_to_model_file(graph)
    path.write_text(model.model_dump_json(), encoding="utf-8")
    logger.info(f"模型已写入 {path}", extra={"nodes": graph.num_nodes, "links": graph.num_link_constraints})
    return path


def parse_model_file(text: str, source: str | None = None) -> ModelFile:
    """解析 JSON 文本；语法错误带行列号，结构错误带字段路径"""
    try:
        data: Any = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(e.msg, source, e.lineno, e.colno) from None
    try:
        return ModelFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise ModelFileError(f"{where}: {first.get('msg')}", source) from None


def read_model_file(path: Union[str, Path]) -> OptiGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFileError(e.strerror or str(e), str(path)) from None
    graph = model_file_to_graph(parse_model_file(text, str(path)))
    logger.debug(f"模型已读取 {path}", extra={"nodes": graph.num_nodes})
    return graph
