# src/domain/ipm/line_search.py
"""
过滤线搜索（回溯，不含二阶校正与可行性恢复）

过滤器条目在加入时已带余量：点 (θ, φ) 存为 ((1 − γ_θ)θ, φ − γ_φ θ)。
试探点被接受，当且仅当对每个条目 (θ_j, φ_j)：θ ≤ θ_j 或 φ ≤ φ_j。
满足切换条件且 θ ≤ θ_min 时用 Armijo 条件（f 型步，不扩充过滤器），
否则要求 θ 或 φ 充分下降，并把当前点加入过滤器。
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from src.domain.exceptions.base_exception import DomainException
from src.domain.exceptions.solver_exceptions import LineSearchFailure
from src.infrastructure.logging.logger import get_logger

logger = get_logger(__name__)

TrialFn = Callable[[np.ndarray], Tuple[float, float]]


def fraction_to_boundary(v: np.ndarray, dv: np.ndarray, tau: float, mask: Optional[np.ndarray] = None) -> float:
    """最大 α ∈ (0, 1] 使 v + α dv ≥ (1 − τ) v（只看 mask 内分量）"""
    if mask is not None:
        v, dv = v[mask], dv[mask]
    neg = dv < 0.0
    if not np.any(neg):
        return 1.0
    return float(min(1.0, np.min(-tau * v[neg] / dv[neg])))


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    theta: float
    phi: float
    f_type: bool
    trials: int


class FilterLineSearch:
    """过滤器与回溯线搜索"""

    def __init__(
        self,
        gamma_theta: float = 1e-5,
        gamma_phi: float = 1e-5,
        eta_phi: float = 1e-4,
        s_theta: float = 1.1,
        s_phi: float = 2.3,
        delta: float = 1.0,
        theta_max_factor: float = 1e4,
        theta_min_factor: float = 1e-4,
        min_step: float = 1e-14,
    ):
        self.gamma_theta = gamma_theta
        self.gamma_phi = gamma_phi
        self.eta_phi = eta_phi
        self.s_theta = s_theta
        self.s_phi = s_phi
        self.delta = delta
        self.theta_max_factor = theta_max_factor
        self.theta_min_factor = theta_min_factor
        self.min_step = min_step
        self.entries: List[Tuple[float, float]] = []
        self.theta_max = math.inf
        self.theta_min = 0.0

    @classmethod
    def from_options(cls, opts) -> "FilterLineSearch":
        return cls(
            gamma_theta=opts.filter_gamma_theta,
            gamma_phi=opts.filter_gamma_phi,
            eta_phi=opts.filter_eta_phi,
            s_theta=opts.filter_s_theta,
            s_phi=opts.filter_s_phi,
            delta=opts.filter_delta,
            theta_max_factor=opts.filter_theta_max_factor,
            theta_min_factor=opts.filter_theta_min_factor,
            min_step=opts.min_step,
        )

    def initialize(self, theta0: float) -> None:
        self.theta_max = self.theta_max_factor * max(1.0, theta0)
        self.theta_min = self.theta_min_factor * max(1.0, theta0)
        self.reset()

    def reset(self) -> None:
        """新的障碍子问题开始时清空过滤器"""
        self.entries = []

    def acceptable(self, theta: float, phi: float) -> bool:
        if not (math.isfinite(theta) and math.isfinite(phi)) or theta >= self.theta_max:
            return False
        return all(theta <= t_j or phi <= p_j for t_j, p_j in self.entries)

    def augment(self, theta: float, phi: float) -> None:
        self.entries.append(((1.0 - self.gamma_theta) * theta, phi - self.gamma_phi * theta))

    def switching(self, alpha: float, theta: float, grad_phi_dx: float) -> bool:
        return grad_phi_dx < 0.0 and alpha * (-grad_phi_dx) ** self.s_phi > self.delta * theta ** self.s_theta

    def search(
        self,
        x: np.ndarray,
        dx: np.ndarray,
        alpha_max: float,
        theta: float,
        phi: float,
        grad_phi_dx: float,
        trial: TrialFn,
        iteration: int = 0,
    ) -> LineSearchResult:
        """从 α_max 起每次减半，直到试探点被接受"""
        alpha = alpha_max
        trials = 0
        while True:
            if alpha < self.min_step:
                raise LineSearchFailure(alpha, iteration)
            trials += 1
            try:
                theta_t, phi_t = trial(x + alpha * dx)
            except (DomainException, ArithmeticError, ValueError) as e:
                logger.debug(f"试探点求值失败，步长减半: {e}")
                alpha *= 0.5
                continue

            if self.acceptable(theta_t, phi_t):
                if self.switching(alpha, theta, grad_phi_dx) and theta <= self.theta_min:
                    if phi_t <= phi + self.eta_phi * alpha * grad_phi_dx:
                        return LineSearchResult(alpha, theta_t, phi_t, True, trials)
                elif (theta_t <= (1.0 - self.gamma_theta) * theta
                      or phi_t <= phi - self.gamma_phi * theta):
                    self.augment(theta, phi)
                    return LineSearchResult(alpha, theta_t, phi_t, False, trials)
            alpha *= 0.5
