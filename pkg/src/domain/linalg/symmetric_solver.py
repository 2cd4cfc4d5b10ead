# src/domain/linalg/symmetric_solver.py
"""
对称不定求解器：按维度在稠密与稀疏分解之间切换。

稀疏路径的填充约简排序按稀疏模式缓存，模式不变（IPM 的各次迭代）时只做数值分解。
"""
from __future__ import annotations

import threading
from typing import Dict, Tuple, Union

import numpy as np

from src.domain.linalg.dense import DenseFactorization, dense_sym_factor
from src.domain.linalg.ldlt import Factorization, ldlt_factor, refine
from src.domain.linalg.ordering import amd_order
from src.domain.linalg.sparse_sym import SparseSym

AnyFactorization = Union[Factorization, DenseFactorization]


class SymmetricSolver:
    """可复用的 LDLᵀ 求解器（线程安全的排序缓存）"""

    def __init__(
        self,
        pivot_tol: float = 0.01,
        dense_threshold: int = 512,
        zero_tol: float = 1e-13,
        refinement_steps: int = 3,
    ):
        self.pivot_tol = pivot_tol
        self.dense_threshold = dense_threshold
        self.zero_tol = zero_tol
        self.refinement_steps = refinement_steps
        self._orderings: Dict[Tuple[int, bytes, bytes], np.ndarray] = {}
        self._lock = threading.Lock()
        self.stats = {"factorizations": 0, "dense": 0, "sparse": 0, "ordering_hits": 0}

    @classmethod
    def from_settings(cls, settings) -> "SymmetricSolver":
        return cls(
            pivot_tol=settings.linsolve_pivot_tol,
            dense_threshold=settings.linsolve_dense_threshold,
            zero_tol=settings.linsolve_zero_pivot_tol,
            refinement_steps=settings.linsolve_refinement_steps,
        )

    def ordering(self, m: SparseSym) -> np.ndarray:
        key = m.pattern_key()
        with self._lock:
            cached = self._orderings.get(key)
            if cached is not None:
                self.stats["ordering_hits"] += 1
                return cached
        perm = amd_order(m)
        with self._lock:
            self._orderings[key] = perm
        return perm

    def factor(self, m: SparseSym) -> AnyFactorization:
        """分解；奇异时抛出 StructurallySingular"""
        with self._lock:
            self.stats["factorizations"] += 1
        if m.n <= self.dense_threshold:
            with self._lock:
                self.stats["dense"] += 1
            return dense_sym_factor(m.lower_dense(), self.zero_tol)
        with self._lock:
            self.stats["sparse"] += 1
        return ldlt_factor(m, self.pivot_tol, self.ordering(m), self.zero_tol)

    def solve(self, m: SparseSym, factor: AnyFactorization, rhs: np.ndarray) -> np.ndarray:
        """求解并做迭代精化"""
        x = factor.solve(rhs)
        if self.refinement_steps:
            x = refine(m, factor, np.asarray(rhs, dtype=float), x, self.refinement_steps)
        return x

    def clear(self) -> None:
        with self._lock:
            self._orderings.clear()
