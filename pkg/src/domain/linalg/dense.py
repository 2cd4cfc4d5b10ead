# src/domain/linalg/dense.py
"""
稠密对称不定 LDLᵀ：LAPACK ?sytrf 分解（Bunch–Kaufman），?sytrs 回代。

两者都在 LAPACK 内完成，计算期间不持有 GIL，块任务可以在线程池里真正并行。
只读取下三角。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import get_lapack_funcs

from src.domain.exceptions.linalg_exceptions import DimensionMismatch, StructurallySingular
from src.domain.linalg.ldlt import Inertia

_sytrf, _sytrf_lwork, _sytrs = get_lapack_funcs(("sytrf", "sytrf_lwork", "sytrs"), dtype=np.float64)


@dataclass(frozen=True)
class DenseFactorization:
    """LAPACK 紧凑存储的分解结果；不可变，可被多个线程同时用于求解"""
    n: int
    ldu: np.ndarray
    ipiv: np.ndarray
    inertia: Inertia

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """向量或多列右端项"""
        b = np.asarray(rhs, dtype=float)
        if b.shape[0] != self.n:
            raise DimensionMismatch(self.n, b.shape[0], "right-hand side rows")
        if self.n == 0:
            return b.copy()
        x, info = _sytrs(self.ldu, self.ipiv, b.reshape(self.n, -1), lower=1)
        if info < 0:
            raise ValueError(f"sytrs: illegal value in argument {-info}")
        return x.reshape(b.shape)


def pivot_eigenvalues(ldu: np.ndarray, ipiv: np.ndarray) -> np.ndarray:
    """D 的特征值；下三角存储中 2×2 主元的两个 ipiv 同为负"""
    neg = np.flatnonzero(ipiv < 0)
    twos = neg[0::2]
    single = np.ones(ipiv.size, dtype=bool)
    single[neg] = False
    d = np.diagonal(ldu)
    a, c, b = d[twos], d[twos + 1], ldu[twos + 1, twos]
    mid = 0.5 * (a + c)
    rad = np.hypot(0.5 * (a - c), b)
    return np.concatenate([d[single], mid + rad, mid - rad])


def dense_sym_factor(matrix: np.ndarray, zero_tol: float = 1e-13) -> DenseFactorization:
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DimensionMismatch(n, a.shape[1] if a.ndim == 2 else 0, "column count")
    if n == 0:
        return DenseFactorization(0, np.zeros((0, 0)), np.zeros(0, dtype=np.int32), (0, 0, 0))

    work, _ = _sytrf_lwork(n, lower=1)
    ldu, ipiv, info = _sytrf(a, lower=1, lwork=max(int(np.real(work)), n, 1))
    if info < 0:
        raise ValueError(f"sytrf: illegal value in argument {-info}")

    abs_zero = zero_tol * max(float(np.max(np.abs(np.tril(a)))), 1.0)
    eig = pivot_eigenvalues(ldu, ipiv)
    inertia = (int(np.sum(eig > abs_zero)), int(np.sum(eig < -abs_zero)), int(np.sum(np.abs(eig) <= abs_zero)))
    if inertia[2]:
        raise StructurallySingular(inertia, n)
    return DenseFactorization(n, ldu, ipiv, inertia)


def dense_solve(matrix: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, Inertia]:
    f = dense_sym_factor(matrix)
    return f.solve(rhs), f.inertia
