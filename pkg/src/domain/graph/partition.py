# src/domain/graph/partition.py
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.domain.exceptions.graph_exceptions import EmptyPart, InvalidPartCount, LengthMismatch
from src.domain.exceptions.validation_exception import ConfigError
from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.structure import node_adjacency
from src.infrastructure.logging.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Partition:
    """成员向量：第 i 个节点（all_nodes 顺序）属于部分 membership[i]"""
    membership: tuple
    num_parts: int

    def __post_init__(self):
        if self.num_parts < 1:
            raise InvalidPartCount(self.num_parts, len(self.membership))
        for value in self.membership:
            if not 0 <= value < self.num_parts:
                raise ConfigError("membership", f"part index {value} outside [0, {self.num_parts})")
        used = set(self.membership)
        for part in range(self.num_parts):
            if part not in used:
                raise EmptyPart(part, self.num_parts)

    @classmethod
    def from_membership(cls, membership: Sequence[int], num_parts: int | None = None) -> "Partition":
        values = tuple(int(v) for v in membership)
        if num_parts is None:
            num_parts = max(values) + 1 if values else 0
        return cls(values, int(num_parts))

    def part_sizes(self) -> List[int]:
        return np.bincount(np.asarray(self.membership, dtype=np.int64), minlength=self.num_parts).tolist()


def partition(graph: OptiGraph, p: Partition) -> None:
    """按成员向量就地重排为 P 个子图；完全落在某部分内的链接移入该子图"""
    nodes = graph.all_nodes()
    if len(p.membership) != len(nodes):
        raise LengthMismatch(len(nodes), len(p.membership))

    links = graph.all_links()
    part_of = {node.id: part for node, part in zip(nodes, p.membership)}

    subgraphs = [OptiGraph(f"{graph.name}.part{k + 1}") for k in range(p.num_parts)]
    for node, part in zip(nodes, p.membership):
        subgraphs[part].nodes.append(node)

    top_links = []
    for link in links:
        parts = {part_of[nid] for nid in link.support}
        if len(parts) == 1:
            subgraphs[parts.pop()].links.append(link)
        else:
            top_links.append(link)

    graph.nodes = []
    graph.links = top_links
    graph.subgraphs = subgraphs
    graph._rebuild_index()

    logger.info(
        f"图 '{graph.name}' 已重新分区",
        extra={"parts": p.num_parts, "sizes": p.part_sizes(), "cut_links": len(top_links)},
    )


def heuristic_partition(graph: OptiGraph, parts: int) -> Partition:
    """
    贪心 BFS 生长分区：每部分从最小编号的未分配节点出发，按编号顺序扩展邻居，
    大小为 ⌈n/P⌉ 或 ⌊n/P⌋（前 n mod P 个部分取上整）。结果只依赖图的顺序。
    """
    nodes = graph.all_nodes()
    n = len(nodes)
    if parts < 1 or parts > n:
        raise InvalidPartCount(parts, n)

    adjacency = node_adjacency(graph)
    index = {node.id: i for i, node in enumerate(nodes)}
    neighbors: List[List[int]] = [
        sorted(index[m] for m in adjacency.neighbors(node.id)) for node in nodes
    ]

    base, extra = divmod(n, parts)
    membership = [-1] * n
    next_seed = 0
    for part in range(parts):
        target = base + (1 if part < extra else 0)
        size = 0
        queue: deque[int] = deque()
        while size < target:
            if not queue:
                while membership[next_seed] != -1:
                    next_seed += 1
                membership[next_seed] = part
                size += 1
                queue.append(next_seed)
                continue
            current = queue.popleft()
            for m in neighbors[current]:
                if size >= target:
                    break
                if membership[m] == -1:
                    membership[m] = part
                    size += 1
                    queue.append(m)
    return Partition(tuple(membership), parts)

