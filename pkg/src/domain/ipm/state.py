# src/domain/ipm/state.py
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class IterationState:
    """
    内点法迭代状态

    z_l / z_u 只在对应侧有有限界时有意义，其余分量恒为 0。
    """
    x: np.ndarray
    lam: np.ndarray
    z_l: np.ndarray
    z_u: np.ndarray
    mu: float
    k: int = 0

    def with_updates(self, **changes) -> "IterationState":
        return replace(self, **changes)


@dataclass(frozen=True)
class SearchDirection:
    d_x: np.ndarray
    d_lambda: np.ndarray
    d_zl: np.ndarray
    d_zu: np.ndarray

    @property
    def d_z(self) -> np.ndarray:
        """d_z = d_z_l − d_z_u（双侧界的合并方向）"""
        return self.d_zl - self.d_zu


@dataclass(frozen=True)
class BoundMasks:
    """有限下界 / 上界的掩码"""
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def from_bounds(cls, lower: np.ndarray, upper: np.ndarray) -> "BoundMasks":
        return cls(np.isfinite(lower), np.isfinite(upper))

    @property
    def count(self) -> int:
        return int(self.lower.sum() + self.upper.sum())
