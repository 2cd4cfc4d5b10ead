# src/domain/linalg/ldlt.py
"""
稀疏对称不定 LDLᵀ 分解（右视消去，阈值 Bunch–Kaufman 1×1 / 2×2 主元）。

P·M·Pᵀ = L·D·Lᵀ，L 按主元顺序存为单位下三角，D 为 1×1 和 2×2 块的块对角阵。
按填充约简顺序取候选列 c，阈值检验（u = pivot_tol）：
  |a_cc| ≥ u·colmax                       → 1×1(c)
  否则 r = argmax |a_rc|：
  |a_cc|·rowmax_r ≥ u·colmax²             → 1×1(c)
  |a_rr| ≥ u·rowmax_r                     → 1×1(r)，随后重新检验 c
  其余                                    → 2×2(c, r)
零主元计入惯性的 n₀，分解结束后抛出 StructurallySingular。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

from src.domain.exceptions.linalg_exceptions import DimensionMismatch, StructurallySingular
from src.domain.linalg.ordering import amd_order
from src.domain.linalg.sparse_sym import SparseSym

Inertia = Tuple[int, int, int]


@dataclass(frozen=True)
class Factorization:
    """稀疏 LDLᵀ 分解结果；不可变，可被多个线程同时用于求解"""
    n: int
    perm: np.ndarray
    L: sp.csr_matrix
    D: sp.csr_matrix
    D_inv: sp.csr_matrix
    inertia: Inertia
    num_two_by_two: int = 0
    L_T: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "L_T", self.L.T.tocsr())

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """向量或多列右端项"""
        b = np.asarray(rhs, dtype=float)
        if b.shape[0] != self.n:
            raise DimensionMismatch(self.n, b.shape[0], "right-hand side rows")
        if self.n == 0:
            return b.copy()
        y = spsolve_triangular(self.L, b[self.perm], lower=True, unit_diagonal=True)
        z = self.D_inv @ y
        w = spsolve_triangular(self.L_T, z, lower=False, unit_diagonal=True)
        x = np.empty_like(w)
        x[self.perm] = w
        return x


def inertia_of_blocks(blocks: List[np.ndarray], zero_tol: float) -> Inertia:
    """由 D 的 1×1 / 2×2 块计算 (n₊, n₋, n₀)"""
    pos = neg = zero = 0
    for blk in blocks:
        eig = np.linalg.eigvalsh(blk) if blk.shape[0] > 1 else blk.ravel()
        for lam in eig:
            if abs(lam) <= zero_tol:
                zero += 1
            elif lam > 0:
                pos += 1
            else:
                neg += 1
    return pos, neg, zero


class _Eliminator:
    """右视消去的工作状态：对称邻接字典（仅非对角）加对角线"""

    def __init__(self, m: SparseSym, order: np.ndarray, pivot_tol: float, zero_tol: float):
        n = m.n
        self.n = n
        self.pivot_tol = pivot_tol
        self.diag = np.zeros(n)
        self.active: List[Dict[int, float]] = [dict() for _ in range(n)]
        lower = m.lower
        scale = 0.0
        for j in range(n):
            for p in range(lower.indptr[j], lower.indptr[j + 1]):
                i = int(lower.indices[p])
                v = float(lower.data[p])
                scale = max(scale, abs(v))
                if i == j:
                    self.diag[j] += v
                else:
                    self.active[j][i] = self.active[j].get(i, 0.0) + v
                    self.active[i][j] = self.active[i].get(j, 0.0) + v
        self.abs_zero = zero_tol * max(scale, 1.0)
        self.position = np.empty(n, dtype=np.int64)
        self.position[order] = np.arange(n)
        self.done = np.zeros(n, dtype=bool)
        self.pivot_seq: List[int] = []
        self.l_cols: Dict[int, Dict[int, float]] = {}
        self.blocks: List[np.ndarray] = []
        self.block_members: List[Tuple[int, ...]] = []
        self.n_zero = 0
        self.two_by_two = 0

    # ------------------------------------------------------------------
    def _argmax(self, c: int) -> Tuple[int, float]:
        col = self.active[c]
        if not col:
            return -1, 0.0
        # 相同幅值时取排序位置靠前者
        return max(((i, abs(v)) for i, v in col.items()),
                   key=lambda t: (t[1], -self.position[t[0]]))

    def pivot(self, c: int) -> None:
        """为候选列 c 选主元并消去，直到 c 本身被消去"""
        u = self.pivot_tol
        while not self.done[c]:
            r, colmax = self._argmax(c)
            acc = abs(self.diag[c])
            if colmax <= self.abs_zero:
                if acc <= self.abs_zero:
                    self.n_zero += 1
                    self.diag[c] = 0.0
                self._one(c)
                return
            if acc >= u * colmax:
                self._one(c)
                return
            rowmax = max(abs(v) for v in self.active[r].values())
            if acc * rowmax >= u * colmax * colmax:
                self._one(c)
            elif abs(self.diag[r]) >= u * rowmax:
                self._one(r)
            else:
                self._two(c, r)

    def _one(self, p: int) -> None:
        d = self.diag[p]
        active = self.active
        col = active[p]
        for i in col:
            active[i].pop(p, None)
        items = list(col.items())
        if d == 0.0:
            self.l_cols[p] = {}
        else:
            self.l_cols[p] = {i: v / d for i, v in items}
            for a, (i, vi) in enumerate(items):
                f = vi / d
                self.diag[i] -= f * vi
                ai = active[i]
                for j, vj in items[a + 1:]:
                    upd = ai.get(j, 0.0) - f * vj
                    ai[j] = upd
                    active[j][i] = upd
        self.blocks.append(np.array([[d]]))
        self.block_members.append((p,))
        active[p] = {}
        self.done[p] = True
        self.pivot_seq.append(p)

    def _two(self, p: int, q: int) -> None:
        active = self.active
        a, b, c = self.diag[p], active[p][q], self.diag[q]
        det = a * c - b * b
        if det == 0.0:
            raise StructurallySingular(inertia_of_blocks(self.blocks, self.abs_zero), self.n)
        inv = np.array([[c, -b], [-b, a]]) / det
        col_p, col_q = active[p], active[q]
        rows = [i for i in col_p if i != q]
        rows += [i for i in col_q if i != p and i not in col_p]
        for i in rows:
            active[i].pop(p, None)
            active[i].pop(q, None)
        coeff = []
        lp: Dict[int, float] = {}
        lq: Dict[int, float] = {}
        for i in rows:
            wp, wq = col_p.get(i, 0.0), col_q.get(i, 0.0)
            li_p = wp * inv[0, 0] + wq * inv[1, 0]
            li_q = wp * inv[0, 1] + wq * inv[1, 1]
            lp[i], lq[i] = li_p, li_q
            coeff.append((i, li_p, li_q, wp, wq))
        for idx, (i, li_p, li_q, wp, wq) in enumerate(coeff):
            self.diag[i] -= li_p * wp + li_q * wq
            ai = active[i]
            for j, _, _, wpj, wqj in coeff[idx + 1:]:
                upd = ai.get(j, 0.0) - (li_p * wpj + li_q * wqj)
                ai[j] = upd
                active[j][i] = upd
        self.blocks.append(np.array([[a, b], [b, c]]))
        self.block_members.append((p, q))
        self.l_cols[p], self.l_cols[q] = lp, lq
        active[p], active[q] = {}, {}
        self.done[p] = self.done[q] = True
        self.pivot_seq.extend((p, q))
        self.two_by_two += 1

    # ------------------------------------------------------------------
    def assemble(self, inertia: Inertia) -> Factorization:
        n = self.n
        perm = np.asarray(self.pivot_seq, dtype=np.int64)
        pos = np.empty(n, dtype=np.int64)
        pos[perm] = np.arange(n)

        rows: List[int] = []
        cols: List[int] = []
        vals: List[float] = []
        for p in self.pivot_seq:
            pp = int(pos[p])
            for i, v in self.l_cols[p].items():
                rows.append(int(pos[i]))
                cols.append(pp)
                vals.append(v)
        L = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

        d_rows: List[int] = []
        d_cols: List[int] = []
        d_vals: List[float] = []
        i_vals: List[float] = []
        for blk, members in zip(self.blocks, self.block_members):
            idx = [int(pos[m]) for m in members]
            inv = np.linalg.inv(blk)
            for a, ia in enumerate(idx):
                for b, ib in enumerate(idx):
                    d_rows.append(ia)
                    d_cols.append(ib)
                    d_vals.append(float(blk[a, b]))
                    i_vals.append(float(inv[a, b]))
        D = sp.csr_matrix((d_vals, (d_rows, d_cols)), shape=(n, n))
        D_inv = sp.csr_matrix((i_vals, (d_rows, d_cols)), shape=(n, n))
        return Factorization(n, perm, L, D, D_inv, inertia, self.two_by_two)


def ldlt_factor(
    m: SparseSym,
    pivot_tol: float = 0.01,
    ordering: Optional[np.ndarray] = None,
    zero_tol: float = 1e-13,
) -> Factorization:
    """稀疏 LDLᵀ 分解；ordering 省略时现场计算最小度排序"""
    order = amd_order(m) if ordering is None else np.asarray(ordering, dtype=np.int64)
    if order.size != m.n:
        raise DimensionMismatch(m.n, int(order.size), "ordering length")
    work = _Eliminator(m, order, pivot_tol, zero_tol)
    for c in order.tolist():
        if not work.done[c]:
            work.pivot(c)
    inertia = inertia_of_blocks(work.blocks, work.abs_zero)
    if work.n_zero or inertia[2]:
        raise StructurallySingular(inertia, m.n)
    return work.assemble(inertia)


def refine(matrix: SparseSym, factor, rhs: np.ndarray, x: np.ndarray, steps: int,
           tol: float = 1e-12) -> np.ndarray:
    """迭代精化 x ← x + M⁻¹(b − Mx)，残差足够小时提前结束"""
    full = matrix.to_full()
    b_norm = float(np.max(np.abs(rhs))) if rhs.size else 0.0
    for _ in range(steps):
        r = rhs - full @ x
        if not r.size or float(np.max(np.abs(r))) <= tol * (1.0 + b_norm):
            break
        x = x + factor.solve(r)
    return x
