# src/schemas/dtos/request/solver_options.py
from typing import Any, Dict, Optional

from pydantic import Field, field_validator

from src.schemas.base_schema import ConfigSchema
from src.schemas.enums.solver_enums import BackendEnum


class SolverOptions(ConfigSchema):
    """内点法求解选项（默认值来自 Settings，命令行可覆盖）"""

    tol: float = Field(1e-8, gt=0, description="收敛容差")
    max_iter: int = Field(500, ge=0, description="最大迭代次数")
    mu0: float = Field(0.1, gt=0, description="初始障碍参数")
    fraction_to_boundary: float = Field(0.995, gt=0, lt=1, description="τ")
    backend: BackendEnum = Field(BackendEnum.MONOLITHIC, description="KKT 后端")
    threads: int = Field(1, ge=1, le=256, description="块任务线程数")

    # 障碍参数与收敛
    kappa_epsilon: float = Field(10.0, gt=0)
    mu_linear_factor: float = Field(0.2, gt=0, lt=1)
    mu_superlinear_power: float = Field(1.5, gt=1, lt=2)
    s_max: float = Field(100.0, ge=1)
    bound_push: float = Field(1e-2, gt=0)
    min_step: float = Field(1e-14, gt=0)

    # 过滤线搜索
    filter_gamma_theta: float = Field(1e-5, gt=0, lt=1)
    filter_gamma_phi: float = Field(1e-5, gt=0, lt=1)
    filter_eta_phi: float = Field(1e-4, gt=0, lt=0.5)
    filter_s_theta: float = Field(1.1, gt=1)
    filter_s_phi: float = Field(2.3, gt=1)
    filter_delta: float = Field(1.0, gt=0)
    filter_theta_max_factor: float = Field(1e4, gt=0)
    filter_theta_min_factor: float = Field(1e-4, gt=0)

    # 惯性修正
    delta_w0: float = Field(1e-4, gt=0)
    delta_w_growth: float = Field(8.0, gt=1)
    delta_w_max: float = Field(1e40, gt=0)
    delta_c: float = Field(1e-8, ge=0, description="δ_c 基数，实际取 δ_c·μ^指数")
    delta_c_exponent: float = Field(0.25, ge=0)

    # 线性代数
    refinement_steps: int = Field(3, ge=0)
    pivot_tol: float = Field(0.01, gt=0, le=1)
    dense_threshold: int = Field(512, ge=0)
    zero_pivot_tol: float = Field(1e-13, gt=0)
    schur_batch: int = Field(32, ge=1)

    @field_validator("backend", mode="before")
    @classmethod
    def parse_backend(cls, v):
        return BackendEnum.parse(v) if isinstance(v, str) else v

    @property
    def backend_enum(self) -> BackendEnum:
        return BackendEnum(self.backend)

    @classmethod
    def from_settings(cls, settings, overrides: Optional[Dict[str, Any]] = None) -> "SolverOptions":
        values: Dict[str, Any] = {
            "tol": settings.ipm_tol,
            "max_iter": settings.ipm_max_iter,
            "mu0": settings.ipm_mu0,
            "fraction_to_boundary": settings.ipm_fraction_to_boundary,
            "threads": settings.threads,
            "kappa_epsilon": settings.ipm_kappa_epsilon,
            "mu_linear_factor": settings.ipm_mu_linear_factor,
            "mu_superlinear_power": settings.ipm_mu_superlinear_power,
            "s_max": settings.ipm_s_max,
            "bound_push": settings.ipm_bound_push,
            "min_step": settings.ipm_min_step,
            "filter_gamma_theta": settings.filter_gamma_theta,
            "filter_gamma_phi": settings.filter_gamma_phi,
            "filter_eta_phi": settings.filter_eta_phi,
            "filter_s_theta": settings.filter_s_theta,
            "filter_s_phi": settings.filter_s_phi,
            "filter_delta": settings.filter_delta,
            "filter_theta_max_factor": settings.filter_theta_max_factor,
            "filter_theta_min_factor": settings.filter_theta_min_factor,
            "delta_w0": settings.reg_delta_w0,
            "delta_w_growth": settings.reg_delta_w_growth,
            "delta_w_max": settings.reg_delta_w_max,
            "delta_c": settings.reg_delta_c_base,
            "delta_c_exponent": settings.reg_delta_c_exponent,
            "refinement_steps": settings.linsolve_refinement_steps,
            "pivot_tol": settings.linsolve_pivot_tol,
            "dense_threshold": settings.linsolve_dense_threshold,
            "zero_pivot_tol": settings.linsolve_zero_pivot_tol,
            "schur_batch": settings.schur_rhs_batch,
        }
        return cls.validated(values, **(overrides or {}))
