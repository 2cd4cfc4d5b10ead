# src/domain/graph/optigraph.py
"""
层级图模型：节点拥有变量/约束/目标，链接约束是连接两个以上节点的超边，
子图可以任意嵌套。all_nodes 的遍历顺序：本层节点在前，然后按插入顺序深度优先遍历子图。
"""
from __future__ import annotations

from itertools import count
from typing import Any, Dict, Hashable, Iterator, List, Optional

from src.domain.exceptions.graph_exceptions import DuplicateNodeId, SingleNodeLink, UnreachableNode
from src.domain.expressions.expression import as_expression
from src.domain.graph.optinode import ConstraintBounds, LinkConstraint, OptiNode


class OptiGraph:
    """OptiGraph"""

    def __init__(self, name: str = "graph"):
        self.name = name
        self.nodes: List[OptiNode] = []
        self.links: List[LinkConstraint] = []
        self.subgraphs: List["OptiGraph"] = []
        self.parent: Optional["OptiGraph"] = None
        self.metadata: Dict[str, Any] = {}
        # 本层及所有子图的节点
        self._index: Dict[Hashable, OptiNode] = {}
        self._auto_ids = count(1)

    # ---- 层级 ----
    def root(self) -> "OptiGraph":
        graph = self
        while graph.parent is not None:
            graph = graph.parent
        return graph

    def _ancestors(self) -> Iterator["OptiGraph"]:
        graph: Optional[OptiGraph] = self
        while graph is not None:
            yield graph
            graph = graph.parent

    def _register(self, nodes: List[OptiNode]) -> None:
        root_index = self.root()._index
        for node in nodes:
            if node.id in root_index:
                raise DuplicateNodeId(node.id)
        for graph in self._ancestors():
            for node in nodes:
                graph._index[node.id] = node

    # ---- 构造 ----
    def add_node(self, node_id: Optional[Hashable] = None) -> OptiNode:
        if node_id is None:
            root_index = self.root()._index
            node_id = f"{self.name}.n{next(self._auto_ids)}"
            while node_id in root_index:
                node_id = f"{self.name}.n{next(self._auto_ids)}"
        node = OptiNode(node_id, self)
        self._register([node])
        self.nodes.append(node)
        return node

    def add_subgraph(self, subgraph: Optional["OptiGraph"] = None, name: Optional[str] = None) -> "OptiGraph":
        """新建子图，或挂载一个独立构造的图"""
        if subgraph is None:
            subgraph = OptiGraph(name or f"{self.name}.sg{len(self.subgraphs) + 1}")
        elif subgraph.parent is not None:
            raise ValueError(f"graph '{subgraph.name}' already has a parent")
        self._register(subgraph.all_nodes())
        subgraph.parent = self
        self.subgraphs.append(subgraph)
        return subgraph

    def link_constraint(
        self,
        expr: Any,
        kind: Optional[ConstraintBounds] = None,
        name: Optional[str] = None,
    ) -> LinkConstraint:
        expr = as_expression(expr)
        support = frozenset(expr.node_ids())
        if len(support) < 2:
            raise SingleNodeLink(support)
        for node_id in support:
            if node_id not in self._index:
                raise UnreachableNode(node_id, self.name)
        for ref in expr.variables():
            self._index[ref.node_id].check_variable(ref.local_index)
        link = LinkConstraint(expr, kind or ConstraintBounds.equality(), support, name)
        self.links.append(link)
        return link

    # ---- 查询 ----
    def all_nodes(self) -> List[OptiNode]:
        out = list(self.nodes)
        for sg in self.subgraphs:
            out.extend(sg.all_nodes())
        return out

    def all_links(self) -> List[LinkConstraint]:
        out = list(self.links)
        for sg in self.subgraphs:
            out.extend(sg.all_links())
        return out

    def node(self, node_id: Hashable) -> OptiNode:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnreachableNode(node_id, self.name) from None

    def has_node(self, node_id: Hashable) -> bool:
        return node_id in self._index

    @property
    def num_nodes(self) -> int:
        return len(self._index)

    @property
    def num_variables(self) -> int:
        return sum(n.num_variables for n in self._index.values())

    @property
    def num_constraints(self) -> int:
        return sum(n.num_constraints for n in self._index.values())

    @property
    def num_link_constraints(self) -> int:
        return len(self.links) + sum(sg.num_link_constraints for sg in self.subgraphs)

    def check_links_reachable(self) -> bool:
        """逐层检查链接约束只引用可达节点"""
        for link in self.links:
            if not all(n in self._index for n in link.support):
                return False
        return all(sg.check_links_reachable() for sg in self.subgraphs)

    def _rebuild_index(self) -> None:
        """结构重排后重建索引（自底向上）"""
        for sg in self.subgraphs:
            sg.parent = self
            sg._rebuild_index()
        self._index = {n.id: n for n in self.nodes}
        for node in self.nodes:
            node.graph = self
        for sg in self.subgraphs:
            self._index.update(sg._index)

    def __repr__(self) -> str:
        return (f"OptiGraph({self.name!r}, nodes={len(self.nodes)}, links={len(self.links)}, "
                f"subgraphs={len(self.subgraphs)})")
