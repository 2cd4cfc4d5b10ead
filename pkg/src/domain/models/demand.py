# src/domain/models/demand.py
from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from src.domain.exceptions.validation_exception import ConfigError


def demand_profile(
    scenario: int,
    Nt: int,
    base: float = 10.0,
    step_mag: Optional[float] = None,
    step_window: Optional[Tuple[int, int]] = None,
    *,
    seed: int = 2021,
    step_range: Tuple[float, float] = (2.0, 6.0),
    window_min: int = 4,
) -> np.ndarray:
    """
    分段常数需求：基准值，窗口 [a, b) 内抬高 step_mag，之后回到基准值。

    未给出的幅度/窗口由 (seed, scenario) 确定的随机数生成：幅度取自 step_range，
    窗口长度不少于 window_min（受 Nt 限制），并且第一个时间点保持基准值。
    """
    if Nt < 1:
        raise ConfigError("Nt", f"need at least one time point, got {Nt}")
    rng = np.random.default_rng([int(seed), int(scenario)])
    if step_window is None:
        if Nt < 2:
            step_window = (0, 0)
        else:
            shortest = max(1, min(window_min, Nt - 1))
            length = int(rng.integers(shortest, Nt))
            start = int(rng.integers(1, Nt - length + 1))
            step_window = (start, start + length)
    if step_mag is None:
        lo, hi = step_range
        step_mag = float(rng.uniform(lo, hi))

    start, stop = step_window
    if not 0 <= start <= stop <= Nt:
        raise ConfigError("step_window", f"window [{start}, {stop}) outside [0, {Nt})")
    profile = np.full(Nt, float(base))
    profile[start:stop] += step_mag
    return profile


def demand_matrix(cfg) -> np.ndarray:
    """[场景, 时间] 需求矩阵（GasConfig 给出显式需求时直接使用）"""
    if cfg.demand is not None:
        return np.asarray(cfg.demand, dtype=float)
    return np.vstack([
        demand_profile(
            s, cfg.Nt, cfg.demand_base,
            seed=cfg.demand_seed,
            step_range=(cfg.demand_step_min, cfg.demand_step_max),
            window_min=cfg.demand_window_min,
        )
        for s in range(1, cfg.scenarios + 1)
    ])


def write_demand_csv(demand: np.ndarray, path: Path, scenario_labels: Optional[Sequence[str]] = None) -> Path:
    """时间 × 场景 CSV：第一列为时间点（从 1 开始）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = list(scenario_labels or [f"scenario{s + 1}" for s in range(demand.shape[0])])
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["t", *labels])
        for t in range(demand.shape[1]):
            writer.writerow([t + 1, *(f"{v:.10g}" for v in demand[:, t])])
    return path
