# src/domain/linalg/sparse_sym.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from src.domain.exceptions.linalg_exceptions import DimensionMismatch


@dataclass(frozen=True)
class SparseSym:
    """对称矩阵的下三角，压缩列存储（CSC）"""
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        if self.indptr.size != self.n + 1:
            raise DimensionMismatch(self.n + 1, int(self.indptr.size), "column pointer array")
        if np.any(np.diff(self.indptr) < 0):
            raise ValueError("column pointers must be monotone")
        cols = np.repeat(np.arange(self.n), np.diff(self.indptr))
        if np.any(self.indices < cols):
            raise ValueError("entry above the diagonal in lower-triangle storage")

    @classmethod
    def from_matrix(cls, matrix) -> "SparseSym":
        """取任意（稀疏或稠密）方阵的下三角；重复项求和"""
        m = sp.csc_matrix(matrix, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(m.shape[0], m.shape[1], "column count")
        lower = sp.tril(m, format="csc")
        lower.sum_duplicates()
        lower.sort_indices()
        return cls(lower.shape[0], lower.indptr.astype(np.int64), lower.indices.astype(np.int64),
                   lower.data.astype(float))

    @classmethod
    def from_triplets(cls, n: int, rows, cols, values) -> "SparseSym":
        """下三角三元组（行 ≥ 列）组装"""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        lo = np.maximum(rows, cols)
        hi = np.minimum(rows, cols)
        return cls.from_matrix(sp.coo_matrix((np.asarray(values, dtype=float), (lo, hi)), shape=(n, n)))

    # ------------------------------------------------------------------
    @property
    def lower(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_full(self) -> sp.csr_matrix:
        low = self.lower
        diag = sp.diags(low.diagonal())
        return (low + low.T - diag).tocsr()

    def lower_dense(self) -> np.ndarray:
        return self.lower.toarray()

    def to_dense(self) -> np.ndarray:
        low = self.lower_dense()
        return low + np.tril(low, -1).T

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    def pattern_key(self) -> Tuple[int, bytes, bytes]:
        """稀疏模式的键，用于缓存符号分析"""
        return self.n, self.indptr.tobytes(), self.indices.tobytes()

    def adjacency(self) -> list[set]:
        """非对角结构的邻接集合"""
        adj: list[set] = [set() for _ in range(self.n)]
        for j in range(self.n):
            for i in self.indices[self.indptr[j]:self.indptr[j + 1]].tolist():
                if i != j:
                    adj[i].add(j)
                    adj[j].add(i)
        return adj
