# src/domain/graph/aggregate.py
"""聚合：把子图（或整个图）折叠成单个节点，变量重命名为 "<node_id>.<name>" """
from __future__ import annotations

from typing import Dict, Hashable, List, Sequence, Tuple

from src.domain.expressions.expression import Expression, VariableRef, quicksum
from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.optinode import LinkConstraint, OptiNode

RefMap = Dict[Tuple[Hashable, int], VariableRef]


def _copy_node(target: OptiGraph, node: OptiNode, mapping: RefMap) -> OptiNode:
    """原样复制节点（表达式共享，变量引用不变）"""
    new = target.add_node(node.id)
    for info in node.variables:
        ref = new.add_variable(info.name, info.lower, info.upper, info.init)
        mapping[(node.id, ref.local_index)] = ref
    new.constraints = list(node.constraints)
    new.objective = node.objective
    return new


def _collapse(
    target: OptiGraph,
    node_id: Hashable,
    nodes: Sequence[OptiNode],
    links: Sequence[LinkConstraint],
    mapping: RefMap,
) -> OptiNode:
    """把一组节点及其内部链接折叠成一个节点"""
    new = target.add_node(node_id)
    for node in nodes:
        for k, info in enumerate(node.variables):
            mapping[(node.id, k)] = new.add_variable(f"{node.id}.{info.name}", info.lower, info.upper, info.init)

    def remap(expr: Expression) -> Expression:
        return expr.bind(lambda ref: mapping[(ref.node_id, ref.local_index)])

    objectives: List[Expression] = []
    for node in nodes:
        for con in node.constraints:
            new.add_constraint(remap(con.expr), con.bounds, con.name)
        if not (node.objective.is_constant and node.objective.value == 0.0):
            objectives.append(remap(node.objective))
    for link in links:
        new.add_constraint(remap(link.expr), link.bounds, link.name)
    if objectives:
        new.set_objective(objectives[0] if len(objectives) == 1 else quicksum(objectives))
    return new


def _unique_id(graph: OptiGraph, wanted: Hashable, reserved: set) -> Hashable:
    candidate, k = wanted, 1
    while candidate in reserved or graph.has_node(candidate):
        k += 1
        candidate = f"{wanted}#{k}"
    return candidate


def _relink(target: OptiGraph, links: Sequence[LinkConstraint], mapping: RefMap) -> None:
    for link in links:
        expr = link.expr.bind(lambda ref: mapping[(ref.node_id, ref.local_index)])
        support = expr.node_ids()
        if len(support) < 2:
            target.node(next(iter(support))).add_constraint(expr, link.bounds, link.name)
        else:
            target.link_constraint(expr, link.bounds, link.name)


def aggregate(graph: OptiGraph) -> OptiGraph:
    """每个顶层子图折叠成一个节点；顶层节点与顶层链接保留"""
    result = OptiGraph(graph.name)
    result.metadata = dict(graph.metadata)
    mapping: RefMap = {}
    for node in graph.nodes:
        _copy_node(result, node, mapping)
    top_ids = {n.id for n in graph.nodes}
    for sg in graph.subgraphs:
        node_id = _unique_id(result, sg.name, top_ids)
        _collapse(result, node_id, sg.all_nodes(), sg.all_links(), mapping)
    _relink(result, graph.links, mapping)
    return result


def aggregate_all(graph: OptiGraph, node_id: Hashable | None = None) -> OptiGraph:
    """整个层级折叠成单个节点"""
    result = OptiGraph(graph.name)
    result.metadata = dict(graph.metadata)
    mapping: RefMap = {}
    _collapse(result, node_id if node_id is not None else graph.name, graph.all_nodes(), graph.all_links(), mapping)
    return result
