# src/application/config/settings.py
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

import yaml
from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """应用配置类 - 支持环境变量（GRAPHNLP_ 前缀）、YAML配置文件和默认值"""

    model_config = SettingsConfigDict(
        env_prefix="GRAPHNLP_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_nested_delimiter="__",
        extra="ignore",
        validate_assignment=True
    )

    # === 核心应用设置 ===
    app_name: str = Field(default="graphnlp")
    app_version: str = Field(default="0.1.0")
    debug: bool = Field(default=False)

    # === 日志设置 ===
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="console")  # json or console

    # === 并行设置 ===
    threads: int = Field(default=1, ge=1, le=256)

    # === 内点法 ===
    ipm_tol: float = Field(default=1e-8, gt=0)
    ipm_max_iter: int = Field(default=500, ge=1)
    ipm_mu0: float = Field(default=0.1, gt=0)
    ipm_fraction_to_boundary: float = Field(default=0.995, gt=0, lt=1)
    ipm_kappa_epsilon: float = Field(default=10.0, gt=0)
    ipm_mu_linear_factor: float = Field(default=0.2, gt=0, lt=1)
    ipm_mu_superlinear_power: float = Field(default=1.5, gt=1)
    ipm_s_max: float = Field(default=100.0, gt=0)
    ipm_bound_push: float = Field(default=1e-2, gt=0)
    ipm_min_step: float = Field(default=1e-14, gt=0)

    # === 过滤线搜索 ===
    filter_gamma_theta: float = Field(default=1e-5, gt=0)
    filter_gamma_phi: float = Field(default=1e-5, gt=0)
    filter_eta_phi: float = Field(default=1e-4, gt=0)
    filter_s_theta: float = Field(default=1.1, gt=1)
    filter_s_phi: float = Field(default=2.3, gt=1)
    filter_delta: float = Field(default=1.0, gt=0)
    filter_theta_max_factor: float = Field(default=1e4, gt=0)
    filter_theta_min_factor: float = Field(default=1e-4, gt=0)

    # === 惯性校正 ===
    reg_delta_w0: float = Field(default=1e-4, gt=0)
    reg_delta_w_growth: float = Field(default=8.0, gt=1)
    reg_delta_w_max: float = Field(default=1e40, gt=0)
    reg_delta_c_base: float = Field(default=1e-8, ge=0)
    reg_delta_c_exponent: float = Field(default=0.25, ge=0)

    # === 线性求解 ===
    linsolve_pivot_tol: float = Field(default=0.01, gt=0, le=1)
    linsolve_refinement_steps: int = Field(default=3, ge=0)
    linsolve_dense_threshold: int = Field(default=512, ge=0)
    linsolve_zero_pivot_tol: float = Field(default=1e-13, gt=0)

    # === Schur 补 ===
    schur_rhs_batch: int = Field(default=32, ge=1)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v_upper

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        valid_formats = ["json", "console"]
        if v.lower() not in valid_formats:
            raise ValueError(f"log_format must be one of {valid_formats}")
        return v.lower()

    def __init__(self, **kwargs):
        load_dotenv()
        super().__init__(**kwargs)
        self._load_config_files()

    def _load_config_files(self) -> None:
        """加载YAML配置文件"""
        config_dir = Path(__file__).parent / "system"

        for file_name in ("core_config.yaml", "solver_config.yaml"):
            config_path = config_dir / file_name
            if config_path.exists():
                with open(config_path, "r", encoding="utf-8") as f:
                    self._update_from_nested_dict(yaml.safe_load(f) or {})

    def _update_from_nested_dict(self, config_dict: Dict[str, Any], prefix: str = "") -> None:
        """从嵌套字典更新配置；显式传入或来自环境变量的值优先"""
        attr_mapping = {
            "app_name": "app_name",
            "app_version": "app_version",
            "app_debug": "debug",
            "logging_level": "log_level",
            "logging_format": "log_format",
            "runtime_threads": "threads",
        }
        for key, value in config_dict.items():
            if isinstance(value, dict):
                new_prefix = f"{prefix}{key}_" if prefix else f"{key}_"
                self._update_from_nested_dict(value, new_prefix)
                continue

            attr_name = f"{prefix}{key}".lower()
            final_attr = attr_mapping.get(attr_name, attr_name)
            if final_attr not in type(self).model_fields:
                continue
            if final_attr in self.model_fields_set:
                continue
            setattr(self, final_attr, value)

    def get_solver_config(self) -> Dict[str, Any]:
        """获取求解器相关配置"""
        return {
            name: getattr(self, name)
            for name in type(self).model_fields
            if name.split("_", 1)[0] in {"ipm", "filter", "reg", "linsolve", "schur"}
        }


@lru_cache()
def get_settings() -> Settings:
    """获取缓存的配置实例"""
    return Settings()
