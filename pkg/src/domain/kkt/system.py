# src/domain/kkt/system.py
"""
增广 KKT 系统

    [ W + Σ + δ_w I    Jᵀ     ] [d_x]     [∇φ + Jᵀλ]
    [ J               −δ_c I  ] [d_λ] = − [c       ]

坐标顺序：先 n 个原始变量，再 m 个约束行。对角线总是显式存储（值可以为 0），
使稀疏模式在各次迭代之间保持不变。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from src.domain.linalg.sparse_sym import SparseSym


@dataclass(frozen=True)
class KKTSystem:
    n: int
    m: int
    hessian: sp.coo_matrix
    sigma: np.ndarray
    jacobian: sp.csr_matrix

    @property
    def dimension(self) -> int:
        return self.n + self.m

    def _triplets(self, delta_w: float, delta_c: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """下三角三元组（含重复项）"""
        n, m = self.n, self.m
        h = self.hessian
        jac = self.jacobian.tocoo()
        diag_idx = np.arange(n + m, dtype=np.int64)
        diag_val = np.concatenate([self.sigma + delta_w, np.full(m, -delta_c)])
        rows = np.concatenate([np.maximum(h.row, h.col), jac.row + n, diag_idx]).astype(np.int64)
        cols = np.concatenate([np.minimum(h.row, h.col), jac.col, diag_idx]).astype(np.int64)
        vals = np.concatenate([h.data, jac.data, diag_val]).astype(float)
        return rows, cols, vals

    def matrix(self, delta_w: float = 0.0, delta_c: float = 0.0) -> SparseSym:
        """正则化后的 KKT 下三角"""
        rows, cols, vals = self._triplets(delta_w, delta_c)
        dim = self.dimension
        lower = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsc()
        lower.sum_duplicates()
        lower.sort_indices()
        return SparseSym(dim, lower.indptr.astype(np.int64), lower.indices.astype(np.int64),
                         lower.data.astype(float))

    def full(self, delta_w: float = 0.0, delta_c: float = 0.0) -> sp.csr_matrix:
        """完整对称矩阵（CSR），供残差与块切分使用"""
        return self.matrix(delta_w, delta_c).to_full()


def kkt_rhs(grad_barrier: np.ndarray, jacobian: sp.csr_matrix, lam: np.ndarray, c: np.ndarray) -> np.ndarray:
    """右端项 −(∇φ + Jᵀλ, c)"""
    return -np.concatenate([grad_barrier + jacobian.T @ lam, c])
