# src/domain/linalg/ordering.py
"""
填充约简排序：在消去图上的最小度排序。

每次消去度最小的顶点（相同度时取编号小的），其邻居两两连通；只有被消去顶点的
邻居度数会变化，所以用带惰性失效标记的堆维护近似度（只在邻居上刷新）。
此外，邻接集合完全相同的顶点（不可区分顶点）在消去一个后立即连续消去（mass elimination）。
"""
from __future__ import annotations

import heapq
from typing import List

import numpy as np

from src.domain.linalg.sparse_sym import SparseSym


def amd_order(matrix: SparseSym) -> np.ndarray:
    """返回消去顺序 perm（perm[k] 为第 k 个消去的原始索引）"""
    n = matrix.n
    adj = matrix.adjacency()
    degree = [len(a) for a in adj]
    eliminated = [False] * n
    heap = [(degree[v], v) for v in range(n)]
    heapq.heapify(heap)
    order: List[int] = []

    def eliminate(v: int) -> List[int]:
        nbrs = [u for u in adj[v] if not eliminated[u]]
        eliminated[v] = True
        order.append(v)
        for u in nbrs:
            adj[u].discard(v)
        for idx, u in enumerate(nbrs):
            au = adj[u]
            for w in nbrs[idx + 1:]:
                if w not in au:
                    au.add(w)
                    adj[w].add(u)
        adj[v] = set()
        return nbrs

    while heap:
        d, v = heapq.heappop(heap)
        if eliminated[v] or d != degree[v]:
            continue
        nbrs = eliminate(v)
        # 邻接 ∪ {自身} 与 v 相同的邻居可以直接跟着消去
        closed = set(nbrs)
        twins = [u for u in sorted(nbrs) if (adj[u] | {u}) == closed]
        for u in twins:
            if not eliminated[u]:
                closed.discard(u)
                eliminate(u)
        for u in nbrs:
            if not eliminated[u]:
                degree[u] = len(adj[u])
                heapq.heappush(heap, (degree[u], u))
    return np.asarray(order, dtype=np.int64)


def inverse_permutation(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size, dtype=p.dtype)
    return inv
