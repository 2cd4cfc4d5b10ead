# src/domain/expressions/derivatives.py
"""函数值、稀疏梯度、Jacobian 与 Lagrangian Hessian（下三角）"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
import scipy.sparse as sp

from src.domain.expressions.expression import Expression


@dataclass
class SparseTriplet:
    """坐标格式稀疏矩阵；重复项在组装时求和"""
    rows: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    cols: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    nrows: int = 0
    ncols: int = 0

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.cols = np.asarray(self.cols, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=float)
        if self.rows.size and (self.rows.min() < 0 or self.rows.max() >= self.nrows):
            raise ValueError("row index out of range")
        if self.cols.size and (self.cols.min() < 0 or self.cols.max() >= self.ncols):
            raise ValueError("column index out of range")

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def entries(self) -> Dict[tuple, float]:
        """{(row, col): value}，重复项求和"""
        out: Dict[tuple, float] = {}
        for r, c, v in zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()):
            out[(r, c)] = out.get((r, c), 0.0) + v
        return out

    def to_coo(self) -> sp.coo_matrix:
        return sp.coo_matrix((self.values, (self.rows, self.cols)), shape=(self.nrows, self.ncols))

    def to_dense(self) -> np.ndarray:
        return self.to_coo().toarray()

    def symmetric_dense(self) -> np.ndarray:
        """把下三角三元组展开成完整对称矩阵"""
        lower = self.to_dense()
        return lower + np.tril(lower, -1).T


def _point(x: Sequence[float]) -> List[float]:
    return x.tolist() if isinstance(x, np.ndarray) else list(x)


def evaluate(expr: Expression, x: Sequence[float]) -> float:
    """在 x 处精确求值"""
    return expr.compile().value(_point(x))


def gradient(expr: Expression, x: Sequence[float]) -> Dict[int, float]:
    """稀疏梯度 {全局索引: 偏导}；未出现的变量不在结果中"""
    tape = expr.compile()
    _, grad = tape.gradient(_point(x))
    return dict(zip(tape.global_indices, grad))


def jacobian(constraints: Sequence[Expression], x: Sequence[float]) -> SparseTriplet:
    """第 i 行为约束 i 的梯度；结构模式与求值点无关"""
    point = _point(x)
    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    for i, con in enumerate(constraints):
        tape = con.compile()
        _, grad = tape.gradient(point)
        rows.extend([i] * len(grad))
        cols.extend(tape.global_indices)
        vals.extend(grad)
    return SparseTriplet(rows, cols, vals, len(constraints), len(x))


def lagrangian_hessian(
    objective: Expression,
    constraints: Sequence[Expression],
    x: Sequence[float],
    obj_weight: float,
    lam: Sequence[float],
) -> SparseTriplet:
    """obj_weight·∇²f + Σ λᵢ∇²cᵢ 的下三角"""
    if len(lam) != len(constraints):
        raise ValueError(f"lambda has {len(lam)} entries for {len(constraints)} constraints")
    point = _point(x)
    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    terms = [(objective, float(obj_weight))] + [(c, float(w)) for c, w in zip(constraints, lam)]
    for expr, weight in terms:
        tape = expr.compile()
        if tape.is_affine:
            continue
        g = tape.global_indices
        for (i, j), v in zip(tape.hessian_pairs, tape.hessian_values(point, weight)):
            gi, gj = g[i], g[j]
            rows.append(max(gi, gj))
            cols.append(min(gi, gj))
            vals.append(v)
    n = len(x)
    return SparseTriplet(rows, cols, vals, n, n)
