# src/domain/graph/flatten.py
"""
把层级图展开为标准形式 min f(x) s.t. c(x) = 0, l ≤ x ≤ u。

全局顺序：按 all_nodes 顺序排列节点；每个节点依次是模型变量、内部不等式的松弛变量、
归属于该节点的链接不等式松弛变量。约束行：先所有节点内部约束，再链接约束
（按层级遍历顺序）。不等式 lo ≤ g(x) ≤ hi 写成 g(x) − s = 0, s ∈ [lo, hi]。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from src.domain.exceptions.base_exception import DomainException
from src.domain.expressions.expression import Expression, VariableRef, quicksum
from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.optinode import ConstraintBounds, LinkConstraint
from src.domain.graph.structure import Block, BlockStructure, detect_master


@dataclass(frozen=True)
class NodeBlock:
    """节点在展开问题中的索引范围"""
    node_id: Hashable
    var_start: int
    var_stop: int
    con_start: int
    con_stop: int
    num_model_vars: int


@dataclass(frozen=True)
class FlatConstraint:
    """展开后的等式约束 expr(x) − rhs = 0"""
    expr: Expression
    rhs: float = 0.0
    name: Optional[str] = None
    is_link: bool = False
    support: Tuple[Hashable, ...] = ()


@dataclass
class FlatNLP:
    """展开后的非线性规划"""
    n_vars: int
    n_cons: int
    lower: np.ndarray
    upper: np.ndarray
    x0: np.ndarray
    constraints: List[FlatConstraint]
    objective_terms: List[Expression]
    block_map: Dict[Hashable, NodeBlock]
    link_rows: np.ndarray
    var_names: List[str]
    var_nodes: List[Hashable]
    structure: BlockStructure
    name: str = "graph"
    num_slacks: int = 0
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def objective(self) -> Expression:
        return quicksum(self.objective_terms)

    @property
    def n_links(self) -> int:
        return int(self.link_rows.size)

    def link_constraints(self) -> List[FlatConstraint]:
        return [self.constraints[i] for i in self.link_rows]

    def solution_by_node(self, x: Sequence[float]) -> Dict[Hashable, Dict[str, float]]:
        """把解向量映射回 {节点: {变量名: 值}}（不含松弛变量）"""
        x = np.asarray(x, dtype=float)
        out: Dict[Hashable, Dict[str, float]] = {}
        for node_id, blk in self.block_map.items():
            names = self.var_names[blk.var_start: blk.var_start + blk.num_model_vars]
            prefix = f"{node_id}."
            out[node_id] = {
                name[len(prefix):] if name.startswith(prefix) else name: float(x[blk.var_start + k])
                for k, name in enumerate(names)
            }
        return out


def _link_slack_owner(link: LinkConstraint, order: Dict[Hashable, int]) -> Hashable:
    return max(link.support, key=lambda nid: order[nid])


def flatten(graph: OptiGraph) -> FlatNLP:
    nodes = graph.all_nodes()
    links = graph.all_links()
    order = {node.id: i for i, node in enumerate(nodes)}

    link_slacks: Dict[Hashable, List[int]] = {node.id: [] for node in nodes}
    for k, link in enumerate(links):
        if not link.bounds.is_equality:
            link_slacks[_link_slack_owner(link, order)].append(k)

    # ---- 变量 ----
    offsets: Dict[Hashable, int] = {}
    lower: List[float] = []
    upper: List[float] = []
    x0: List[float] = []
    var_names: List[str] = []
    var_nodes: List[Hashable] = []
    node_slack_ref: Dict[Tuple[Hashable, int], VariableRef] = {}
    link_slack_ref: Dict[int, VariableRef] = {}
    var_ranges: Dict[Hashable, Tuple[int, int, int]] = {}
    num_slacks = 0

    for node in nodes:
        start = len(lower)
        offsets[node.id] = start
        for info in node.variables:
            lower.append(info.lower)
            upper.append(info.upper)
            x0.append(info.init)
            var_names.append(f"{node.id}.{info.name}")
            var_nodes.append(node.id)
        local = node.num_variables

        def add_slack(bounds: ConstraintBounds, label: str) -> VariableRef:
            nonlocal local
            ref = VariableRef(node.id, local, len(lower))
            lower.append(bounds.lo)
            upper.append(bounds.hi)
            x0.append(0.0)
            var_names.append(f"{node.id}.{label}")
            var_nodes.append(node.id)
            local += 1
            return ref

        for c_idx, con in enumerate(node.constraints):
            if not con.bounds.is_equality:
                node_slack_ref[(node.id, c_idx)] = add_slack(con.bounds, f"slack[{c_idx}]")
        for k in link_slacks[node.id]:
            link_slack_ref[k] = add_slack(links[k].bounds, f"link_slack[{k}]")
        num_slacks += local - node.num_variables
        var_ranges[node.id] = (start, len(lower), node.num_variables)

    def bind(expr: Expression) -> Expression:
        return expr.bind(lambda ref: ref.with_global_index(offsets[ref.node_id] + ref.local_index))

    x0_arr = np.asarray(x0, dtype=float)

    def slack_start(expr: Expression, ref: VariableRef) -> None:
        bounds = (lower[ref.global_index], upper[ref.global_index])
        try:
            value = expr.compile().value(x0)
        except (DomainException, ArithmeticError):
            value = 0.0
        x0_arr[ref.global_index] = float(np.clip(value, *bounds))

    # ---- 约束 ----
    constraints: List[FlatConstraint] = []
    con_ranges: Dict[Hashable, Tuple[int, int]] = {}
    for node in nodes:
        start = len(constraints)
        for c_idx, con in enumerate(node.constraints):
            expr = bind(con.expr)
            if con.bounds.is_equality:
                constraints.append(FlatConstraint(expr, con.bounds.lo, con.name, False, (node.id,)))
            else:
                slack = node_slack_ref[(node.id, c_idx)]
                slack_start(expr, slack)
                constraints.append(FlatConstraint(expr - slack, 0.0, con.name, False, (node.id,)))
        con_ranges[node.id] = (start, len(constraints))

    link_row_of: Dict[int, int] = {}
    for k, link in enumerate(links):
        expr = bind(link.expr)
        support = tuple(sorted(link.support, key=lambda nid: order[nid]))
        link_row_of[k] = len(constraints)
        if link.bounds.is_equality:
            constraints.append(FlatConstraint(expr, link.bounds.lo, link.name, True, support))
        else:
            slack = link_slack_ref[k]
            slack_start(expr, slack)
            constraints.append(FlatConstraint(expr - slack, 0.0, link.name, True, support))

    block_map = {
        node.id: NodeBlock(node.id, *var_ranges[node.id][:2], *con_ranges[node.id], var_ranges[node.id][2])
        for node in nodes
    }
    objective_terms = [bind(n.objective) for n in nodes if not _is_zero(n.objective)]

    structure = _top_level_structure(graph, block_map, links, link_row_of)
    return FlatNLP(
        n_vars=len(lower),
        n_cons=len(constraints),
        lower=np.asarray(lower, dtype=float),
        upper=np.asarray(upper, dtype=float),
        x0=x0_arr,
        constraints=constraints,
        objective_terms=objective_terms,
        block_map=block_map,
        link_rows=np.asarray([link_row_of[k] for k in range(len(links))], dtype=np.int64),
        var_names=var_names,
        var_nodes=var_nodes,
        structure=structure,
        name=graph.name,
        num_slacks=num_slacks,
        metadata=dict(graph.metadata),
    )


def _is_zero(expr: Expression) -> bool:
    return expr.is_constant and expr.value == 0.0


def _top_level_structure(
    graph: OptiGraph,
    block_map: Dict[Hashable, NodeBlock],
    links: List[LinkConstraint],
    link_row_of: Dict[int, int],
) -> BlockStructure:
    """顶层节点与顶层子图各为一块，顶层链接为边界"""
    blocks: List[Block] = []

    def node_indices(node_ids: List[Hashable]) -> Tuple[np.ndarray, np.ndarray]:
        var_idx = [np.arange(block_map[n].var_start, block_map[n].var_stop) for n in node_ids]
        row_idx = [np.arange(block_map[n].con_start, block_map[n].con_stop) for n in node_ids]
        return (np.concatenate(var_idx) if var_idx else np.zeros(0, dtype=np.int64),
                np.concatenate(row_idx) if row_idx else np.zeros(0, dtype=np.int64))

    for node in graph.nodes:
        v, r = node_indices([node.id])
        blocks.append(Block(str(node.id), v.astype(np.int64), r.astype(np.int64), (node.id,), True))

    link_pos = {id(link): k for k, link in enumerate(links)}
    for sg in graph.subgraphs:
        ids = [n.id for n in sg.all_nodes()]
        v, r = node_indices(ids)
        inner = [link_row_of[link_pos[id(link)]] for link in sg.all_links()]
        rows = np.concatenate([r, np.asarray(inner, dtype=np.int64)])
        blocks.append(Block(sg.name, v.astype(np.int64), rows.astype(np.int64), tuple(ids), False))

    border = np.asarray([link_row_of[link_pos[id(link)]] for link in graph.links], dtype=np.int64)
    master = detect_master(blocks, [link.support for link in graph.links])
    return BlockStructure(tuple(blocks), border, master)
