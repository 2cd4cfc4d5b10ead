# src/domain/ipm/evaluator.py
"""
展开问题的函数与导数求值

Jacobian 与 Lagrangian Hessian 的稀疏模式在构造时一次确定，之后每次只刷新数值。
约束按块分组求值（每个对角块的行 + 边界行），块任务经线程池执行，
结果按固定位置写回，与线程数无关。
"""
from __future__ import annotations

import time
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.domain.graph.flatten import FlatNLP
from src.infrastructure.logging.logger import LoggerMixin
from src.infrastructure.tasks.worker_pool import BlockWorkerPool


class NLPEvaluator(LoggerMixin):
    """f、∇f、c、J、W 的求值器"""

    def __init__(self, flat: FlatNLP, pool: Optional[BlockWorkerPool] = None):
        self.flat = flat
        self.n = flat.n_vars
        self.m = flat.n_cons
        self.pool = pool or BlockWorkerPool(1)
        self._obj = [t.compile() for t in flat.objective_terms]
        self._con = [c.expr.compile() for c in flat.constraints]
        self._rhs = np.asarray([c.rhs for c in flat.constraints], dtype=float)

        # Jacobian 模式（CSR）
        indptr = [0]
        indices: List[int] = []
        for tape in self._con:
            indices.extend(tape.global_indices)
            indptr.append(len(indices))
        self._jac_indptr = np.asarray(indptr, dtype=np.int64)
        self._jac_indices = np.asarray(indices, dtype=np.int64)

        # Hessian 模式（下三角坐标，可含重复项）
        h_rows: List[int] = []
        h_cols: List[int] = []

        def pattern(tape) -> Tuple[int, int]:
            start = len(h_rows)
            g = tape.global_indices
            for i, j in tape.hessian_pairs:
                h_rows.append(max(g[i], g[j]))
                h_cols.append(min(g[i], g[j]))
            return start, len(h_rows)

        self._h_obj = [pattern(t) for t in self._obj]
        self._h_con = [pattern(t) for t in self._con]
        self._h_rows = np.asarray(h_rows, dtype=np.int64)
        self._h_cols = np.asarray(h_cols, dtype=np.int64)

        self._con_chunks = self._constraint_chunks()
        size = max(1, -(-len(self._obj) // max(self.pool.threads, 1)))
        self._obj_chunks = [list(range(s, min(s + size, len(self._obj)))) for s in range(0, len(self._obj), size)]

        self.timings = {"function_eval": 0.0, "derivative_eval": 0.0}
        self.counts = {"function_eval": 0, "derivative_eval": 0}

    def _constraint_chunks(self) -> List[List[int]]:
        structure = self.flat.structure
        chunks = [b.row_index.tolist() for b in structure.blocks]
        chunks.append(structure.border_rows.tolist())
        chunks = [c for c in chunks if c]
        covered = sum(len(c) for c in chunks)
        if covered != self.m:
            return [list(range(self.m))] if self.m else []
        return chunks

    # ------------------------------------------------------------------
    @staticmethod
    def _point(x: Sequence[float]) -> List[float]:
        return x.tolist() if isinstance(x, np.ndarray) else list(x)

    def _timed(self, key: str, start: float) -> None:
        self.timings[key] += time.perf_counter() - start
        self.counts[key] += 1

    @property
    def jacobian_nnz(self) -> int:
        return int(self._jac_indices.size)

    @property
    def hessian_nnz(self) -> int:
        return int(self._h_rows.size)

    def objective(self, x: Sequence[float]) -> float:
        start = time.perf_counter()
        point = self._point(x)
        parts = self.pool.map(lambda chunk: [self._obj[t].value(point) for t in chunk], self._obj_chunks)
        value = float(sum(v for part in parts for v in part))
        self._timed("function_eval", start)
        return value

    def constraints(self, x: Sequence[float]) -> np.ndarray:
        start = time.perf_counter()
        point = self._point(x)
        out = np.zeros(self.m)
        parts = self.pool.map(lambda rows: [self._con[i].value(point) for i in rows], self._con_chunks)
        for rows, vals in zip(self._con_chunks, parts):
            out[rows] = vals
        self._timed("function_eval", start)
        return out - self._rhs

    def gradient(self, x: Sequence[float]) -> np.ndarray:
        start = time.perf_counter()
        point = self._point(x)
        grad = np.zeros(self.n)
        parts = self.pool.map(lambda chunk: [self._obj[t].gradient(point)[1] for t in chunk], self._obj_chunks)
        for chunk, grads in zip(self._obj_chunks, parts):
            for t, g in zip(chunk, grads):
                if g:
                    np.add.at(grad, np.asarray(self._obj[t].global_indices, dtype=np.int64), g)
        self._timed("derivative_eval", start)
        return grad

    def jacobian(self, x: Sequence[float]) -> sp.csr_matrix:
        start = time.perf_counter()
        point = self._point(x)
        data = np.zeros(self._jac_indices.size)
        parts = self.pool.map(lambda rows: [self._con[i].gradient(point)[1] for i in rows], self._con_chunks)
        for rows, grads in zip(self._con_chunks, parts):
            for i, g in zip(rows, grads):
                data[self._jac_indptr[i]:self._jac_indptr[i + 1]] = g
        self._timed("derivative_eval", start)
        return sp.csr_matrix((data, self._jac_indices, self._jac_indptr), shape=(self.m, self.n))

    def hessian(self, x: Sequence[float], obj_weight: float, lam: np.ndarray) -> sp.coo_matrix:
        """obj_weight·∇²f + Σ λᵢ∇²cᵢ 的下三角（固定模式，重复项在组装时求和）"""
        start = time.perf_counter()
        point = self._point(x)
        lam = np.asarray(lam, dtype=float)
        data = np.zeros(self._h_rows.size)

        def con_chunk(rows):
            return [self._con[i].hessian_values(point, float(lam[i])) for i in rows]

        def obj_chunk(chunk):
            return [self._obj[t].hessian_values(point, float(obj_weight)) for t in chunk]

        for chunk, vals in zip(self._obj_chunks, self.pool.map(obj_chunk, self._obj_chunks)):
            for t, v in zip(chunk, vals):
                s, e = self._h_obj[t]
                data[s:e] = v
        for rows, vals in zip(self._con_chunks, self.pool.map(con_chunk, self._con_chunks)):
            for i, v in zip(rows, vals):
                s, e = self._h_con[i]
                data[s:e] = v
        self._timed("derivative_eval", start)
        return sp.coo_matrix((data, (self._h_rows, self._h_cols)), shape=(self.n, self.n))
