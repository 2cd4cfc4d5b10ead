# src/schemas/dtos/request/pid_config.py
from typing import Any, Dict, List, Tuple

from pydantic import Field, field_validator, model_validator

from src.schemas.base_schema import ConfigSchema
from src.schemas.enums.solver_enums import PidOrderingEnum

# 场景数改变而未给出扰动/设定点时循环使用这组设定点
DEFAULT_SETPOINTS = [-2.0, -1.5, -0.5, 0.5, 1.0]


class PidConfig(ConfigSchema):
    """随机 PID 整定模型参数"""

    NS: int = Field(5, ge=1, description="场景数")
    N: int = Field(100, ge=2, description="时间步数")
    Tf: float = Field(10.0, gt=0, description="终止时间")
    K: float = Field(1.0, description="过程增益")
    x0: float = Field(0.0, description="初始状态")
    Kd: float = Field(0.5, description="扰动增益")
    tau: float = Field(1.0, description="时间常数")
    d: List[float] = Field(default_factory=lambda: [-1.0] * 5, description="各场景扰动")
    xsp: List[float] = Field(default_factory=lambda: list(DEFAULT_SETPOINTS), description="各场景设定点")
    x_bounds: Tuple[float, float] = (-2.5, 2.5)
    u_bounds: Tuple[float, float] = (-2.0, 2.0)
    Kc_bounds: Tuple[float, float] = (-10.0, 10.0)
    tau_bounds: Tuple[float, float] = (-100.0, 100.0)
    tracking_weight: float = Field(100.0, gt=0)
    control_weight: float = Field(0.01, ge=0)
    ordering: PidOrderingEnum = Field(PidOrderingEnum.SCENARIO_MAJOR)

    @model_validator(mode="before")
    @classmethod
    def resize_scenarios(cls, data: Any) -> Any:
        """只给出 NS 时，扰动与设定点按场景数补齐"""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        explicit_d = data.pop("_explicit_d", False)
        explicit_xsp = data.pop("_explicit_xsp", False)
        if "NS" not in data:
            return data
        ns = int(data["NS"])
        if len(data.get("d") or []) != ns and not explicit_d:
            base = data.get("d") or [-1.0]
            data["d"] = [base[i % len(base)] for i in range(ns)]
        if len(data.get("xsp") or []) != ns and not explicit_xsp:
            base = data.get("xsp") or DEFAULT_SETPOINTS
            data["xsp"] = [base[i % len(base)] for i in range(ns)]
        return data

    @field_validator("x_bounds", "u_bounds", "Kc_bounds", "tau_bounds")
    @classmethod
    def ordered(cls, v):
        if v[0] > v[1]:
            raise ValueError(f"lower bound {v[0]} exceeds upper bound {v[1]}")
        return v

    @field_validator("tau")
    @classmethod
    def nonzero_tau(cls, v):
        if v == 0:
            raise ValueError("time constant must be nonzero")
        return v

    @model_validator(mode="after")
    def scenario_lengths(self):
        if len(self.d) != self.NS or len(self.xsp) != self.NS:
            raise ValueError(f"d and xsp need {self.NS} entries, got {len(self.d)} and {len(self.xsp)}")
        return self

    @property
    def h(self) -> float:
        return self.Tf / self.N

    @classmethod
    def from_defaults(cls, defaults: Dict[str, Any], **overrides: Any) -> "PidConfig":
        """YAML 默认值 + 命令行覆盖；显式给出的 d / xsp 不做补齐"""
        values = dict(defaults)
        if overrides.get("d") is not None:
            values["_explicit_d"] = True
        if overrides.get("xsp") is not None:
            values["_explicit_xsp"] = True
        return cls.validated(values, **overrides)
