# src/domain/kkt/backend_interface.py
"""
KKT 后端接口与惯性修正循环

所有后端只需实现 factor(system, δ_w, δ_c) → 带 inertia 与 solve() 的分解对象；
正则化、迭代精化在这里统一处理，三个后端因此遵循相同的修正序列。
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Protocol, Tuple

import numpy as np

from src.domain.exceptions.linalg_exceptions import StructurallySingular
from src.domain.exceptions.solver_exceptions import SingularBlock, SingularKKT, SingularSchur
from src.domain.kkt.system import KKTSystem
from src.infrastructure.logging.logger import LoggerMixin

Inertia = Tuple[int, int, int]


class KKTFactor(Protocol):
    inertia: Inertia

    def solve(self, rhs: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class Regularization:
    """惯性修正参数"""
    delta_w0: float = 1e-4
    growth: float = 8.0
    delta_w_max: float = 1e40
    delta_c_base: float = 1e-8
    delta_c_exponent: float = 0.25

    @classmethod
    def from_settings(cls, settings) -> "Regularization":
        return cls(
            delta_w0=settings.reg_delta_w0,
            growth=settings.reg_delta_w_growth,
            delta_w_max=settings.reg_delta_w_max,
            delta_c_base=settings.reg_delta_c_base,
            delta_c_exponent=settings.reg_delta_c_exponent,
        )

    def delta_c(self, mu: float) -> float:
        return self.delta_c_base * mu ** self.delta_c_exponent


@dataclass(frozen=True)
class KKTSolution:
    direction: np.ndarray
    delta_w: float
    delta_c: float
    inertia: Inertia
    corrections: int
    residual: float


class KKTBackend(ABC, LoggerMixin):
    """KKT 后端基类"""

    name: str = "abstract"

    def prepare(self, flat) -> None:
        """针对具体问题的一次性检查与预处理"""

    @abstractmethod
    def factor(self, system: KKTSystem, delta_w: float, delta_c: float) -> KKTFactor:
        """分解正则化后的系统；奇异时抛出 StructurallySingular / SingularBlock / SingularSchur"""

    def get_backend_info(self) -> Dict[str, Any]:
        return {"backend": self.name}

    def close(self) -> None:
        """释放线程池等资源"""


_SINGULAR = (StructurallySingular, SingularBlock, SingularSchur)


def solve_regularized(
    backend: KKTBackend,
    system: KKTSystem,
    rhs: np.ndarray,
    mu: float,
    reg: Regularization,
    refinement_steps: int = 3,
    refinement_tol: float = 1e-12,
) -> KKTSolution:
    """
    惯性修正：δ_w 从 0 开始，不满足 (n, m, 0) 时取 δ_w0 并按倍数增长；
    出现零特征值且 δ_c 尚为 0 时先加 δ_c。超过上限抛出 SingularKKT。
    """
    n, m = system.n, system.m
    wanted = (n, m, 0)
    delta_w, delta_c = 0.0, 0.0
    corrections = 0
    last_inertia: Optional[Inertia] = None
    while True:
        singular = False
        try:
            factor = backend.factor(system, delta_w, delta_c)
            last_inertia = tuple(factor.inertia)
            if last_inertia == wanted:
                break
            singular = last_inertia[2] > 0
        except _SINGULAR as e:
            singular = True
            last_inertia = getattr(e, "inertia", None)

        corrections += 1
        if singular and m > 0 and delta_c == 0.0:
            delta_c = reg.delta_c(mu)
            if last_inertia is None or last_inertia[0] >= n:
                continue
        delta_w = reg.delta_w0 if delta_w == 0.0 else delta_w * reg.growth
        if delta_w > reg.delta_w_max:
            raise SingularKKT(delta_w, {"inertia": list(last_inertia) if last_inertia else None,
                                        "backend": backend.name})

    d = factor.solve(rhs)
    full = system.full(delta_w, delta_c)
    b_norm = float(np.max(np.abs(rhs))) if rhs.size else 0.0
    residual = float(np.max(np.abs(rhs - full @ d))) if rhs.size else 0.0
    for _ in range(refinement_steps):
        if residual <= refinement_tol * (1.0 + b_norm):
            break
        d = d + factor.solve(rhs - full @ d)
        residual = float(np.max(np.abs(rhs - full @ d)))
    if corrections:
        backend.logger.debug(
            f"惯性修正 {corrections} 次", extra={"delta_w": delta_w, "delta_c": delta_c, "backend": backend.name}
        )
    return KKTSolution(d, delta_w, delta_c, last_inertia, corrections, residual)
