# src/domain/graph/structure.py
"""块结构检测与图结构导出（邻接表 / DOT）"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Tuple

import networkx as nx
import numpy as np

from src.domain.graph.optigraph import OptiGraph


@dataclass(frozen=True)
class Block:
    """一个对角块：顶层节点，或顶层子图的全部节点"""
    name: str
    var_index: np.ndarray
    row_index: np.ndarray
    node_ids: Tuple[Hashable, ...]
    is_node: bool


@dataclass(frozen=True)
class BlockStructure:
    """块加边界结构；border_rows 是顶层链接约束的行"""
    blocks: Tuple[Block, ...]
    border_rows: np.ndarray
    master: Optional[int] = None

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_of_node(self) -> Dict[Hashable, int]:
        return {nid: b for b, block in enumerate(self.blocks) for nid in block.node_ids}


def detect_master(blocks: List[Block], border_supports: List[frozenset]) -> Optional[int]:
    """唯一一个被所有顶层链接触及的顶层节点块"""
    if not border_supports:
        return None
    owner = {nid: b for b, block in enumerate(blocks) for nid in block.node_ids}
    candidates = None
    for support in border_supports:
        touched = {owner[n] for n in support}
        candidates = touched if candidates is None else candidates & touched
    node_candidates = sorted(b for b in (candidates or ()) if blocks[b].is_node)
    return node_candidates[0] if len(node_candidates) == 1 else None


# ---------------------------------------------------------------------------
# 图结构导出
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class AdjacencyExport:
    """节点标签、所属部分以及团展开后的边（边颜色：同一部分内为部分编号，否则 -1）"""
    labels: Tuple[Hashable, ...]
    parts: Tuple[int, ...]
    edges: Tuple[Tuple[int, int, int], ...]

    def matrix(self) -> np.ndarray:
        n = len(self.labels)
        adj = np.zeros((n, n), dtype=np.int8)
        for i, j, _ in self.edges:
            adj[i, j] = adj[j, i] = 1
        return adj


def node_adjacency(graph: OptiGraph) -> nx.Graph:
    """超图的团展开；节点属性 index 为 all_nodes 中的位置"""
    nodes = graph.all_nodes()
    g = nx.Graph()
    for i, node in enumerate(nodes):
        g.add_node(node.id, index=i)
    for link in graph.all_links():
        support = sorted(link.support, key=lambda nid: g.nodes[nid]["index"])
        for a in range(len(support)):
            for b in range(a + 1, len(support)):
                g.add_edge(support[a], support[b])
    return g


def node_parts(graph: OptiGraph) -> List[int]:
    """顶层子图编号；顶层节点记为 -1"""
    parts = [-1] * len(graph.nodes)
    for k, sg in enumerate(graph.subgraphs):
        parts.extend([k] * len(sg.all_nodes()))
    return parts


def adjacency_export(graph: OptiGraph) -> AdjacencyExport:
    g = node_adjacency(graph)
    labels = tuple(n.id for n in graph.all_nodes())
    parts = node_parts(graph)
    edges = set()
    for u, v in g.edges():
        i, j = g.nodes[u]["index"], g.nodes[v]["index"]
        i, j = min(i, j), max(i, j)
        color = parts[i] if parts[i] == parts[j] and parts[i] >= 0 else -1
        edges.add((i, j, color))
    return AdjacencyExport(labels, tuple(parts), tuple(sorted(edges)))


_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def to_dot(export: AdjacencyExport, name: str = "optigraph") -> str:
    """DOT 文本，节点与边按部分着色"""
    def color(part: int) -> str:
        return "black" if part < 0 else _PALETTE[part % len(_PALETTE)]

    lines = [f'graph "{name}" {{', "  node [shape=point];"]
    for i, (label, part) in enumerate(zip(export.labels, export.parts)):
        lines.append(f'  n{i} [label="{label}", color="{color(part)}"];')
    for i, j, part in export.edges:
        lines.append(f'  n{i} -- n{j} [color="{color(part)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_adjacency_csv(export: AdjacencyExport, path: Path) -> Path:
    np.savetxt(path, export.matrix(), fmt="%d", delimiter=",",
               header=",".join(map(str, export.labels)), comments="")
    return path
