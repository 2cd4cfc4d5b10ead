# src/domain/ipm/barrier.py
"""障碍参数更新、障碍目标与缩放 KKT 误差"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from src.domain.ipm.state import BoundMasks, IterationState


def update_barrier(
    mu: float,
    tol: float,
    linear_factor: float = 0.2,
    superlinear_power: float = 1.5,
) -> float:
    """μ⁺ = max(tol/11, min(κ_μ·μ, μ^θ_μ))；单调不增"""
    new_mu = max(tol / 11.0, min(linear_factor * mu, mu ** superlinear_power))
    return min(new_mu, mu)


def slacks(x: np.ndarray, lower: np.ndarray, upper: np.ndarray, masks: BoundMasks) -> Tuple[np.ndarray, np.ndarray]:
    """x − l 与 u − x；无界侧置 1（不参与计算）"""
    s_l = np.where(masks.lower, x - np.where(masks.lower, lower, 0.0), 1.0)
    s_u = np.where(masks.upper, np.where(masks.upper, upper, 0.0) - x, 1.0)
    return s_l, s_u


def barrier_objective(f: float, x: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                      masks: BoundMasks, mu: float) -> float:
    """φ_μ(x) = f(x) − μ Σ log(x − l) − μ Σ log(u − x)"""
    s_l, s_u = slacks(x, lower, upper, masks)
    if np.any(s_l[masks.lower] <= 0.0) or np.any(s_u[masks.upper] <= 0.0):
        return math.inf
    return f - mu * (float(np.log(s_l[masks.lower]).sum()) + float(np.log(s_u[masks.upper]).sum()))


def barrier_gradient(grad_f: np.ndarray, x: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                     masks: BoundMasks, mu: float) -> np.ndarray:
    """∇φ_μ = ∇f − μ/(x − l) + μ/(u − x)"""
    s_l, s_u = slacks(x, lower, upper, masks)
    return grad_f - np.where(masks.lower, mu / s_l, 0.0) + np.where(masks.upper, mu / s_u, 0.0)


def constraint_violation(c: np.ndarray) -> float:
    """θ(x) = ‖c(x)‖₁"""
    return float(np.abs(c).sum()) if c.size else 0.0


def kkt_error(
    state: IterationState,
    grad_f: np.ndarray,
    jacobian: sp.csr_matrix,
    c: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    masks: BoundMasks,
    mu: float = 0.0,
    s_max: float = 100.0,
) -> float:
    """
    缩放后的最优性误差：max(‖∇f + Jᵀλ − z_l + z_u‖∞ / s_d, ‖c‖∞, ‖(X−L)z_l − μ‖∞ / s_c, …)

    s_d = max(s_max, (‖λ‖₁ + ‖z‖₁)/(m + n_b)) / s_max，s_c = max(s_max, ‖z‖₁/n_b) / s_max
    """
    m = state.lam.size
    zl = state.z_l[masks.lower]
    zu = state.z_u[masks.upper]
    n_b = zl.size + zu.size
    z_sum = float(np.abs(zl).sum() + np.abs(zu).sum())
    s_d = max(s_max, (float(np.abs(state.lam).sum()) + z_sum) / max(m + n_b, 1)) / s_max
    s_c = max(s_max, z_sum / max(n_b, 1)) / s_max

    dual = grad_f + (jacobian.T @ state.lam if m else 0.0) - state.z_l + state.z_u
    s_l, s_u = slacks(state.x, lower, upper, masks)
    comp_l = s_l[masks.lower] * zl - mu
    comp_u = s_u[masks.upper] * zu - mu
    return max(
        _inf_norm(dual) / s_d,
        _inf_norm(c),
        max(_inf_norm(comp_l), _inf_norm(comp_u)) / s_c,
    )


def _inf_norm(v) -> float:
    v = np.asarray(v)
    return float(np.max(np.abs(v))) if v.size else 0.0
