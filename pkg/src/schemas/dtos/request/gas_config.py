# src/schemas/dtos/request/gas_config.py
from typing import Any, Dict, List, Optional

from pydantic import Field, model_validator

from src.schemas.base_schema import ConfigSchema


class GasConfig(ConfigSchema):
    """随机天然气管网模型参数"""

    # 拓扑：P1 C1 P2 C2 … Pk Ck 之后接剩余管道，相邻元件之间一个节点
    n_compressors: int = Field(11, ge=0)
    n_pipelines: int = Field(13, ge=1)
    n_junctions: int = Field(25, ge=2)
    Nt: int = Field(24, ge=2, description="时间点数")
    Nx: int = Field(10, ge=2, description="每条管道的空间点数")
    scenarios: int = Field(1, ge=1)

    # 物理常数
    c1: float = Field(1.0, gt=0)
    c2: float = Field(1.0, gt=0)
    c3: float = Field(0.25, ge=0)
    dt: float = Field(1.0, gt=0)
    pipe_length: float = Field(10.0, gt=0)
    cP: float = Field(1.0, gt=0)
    T: float = Field(10.0, gt=0)
    gamma: float = Field(1.3, gt=1)

    # 边界
    pressure_min: float = Field(30.0, gt=0)
    pressure_max: float = Field(70.0, gt=0)
    boost_max: float = Field(20.0, ge=0)
    power_max: float = Field(20.0, ge=0)
    supply_max: float = Field(40.0, ge=0)
    flow_max: float = Field(60.0, gt=0)

    # 目标权重
    alpha: float = Field(0.1, gt=0)
    beta: float = Field(1.0, gt=0)
    kappa: float = Field(1.0, gt=0)

    # 需求曲线
    demand_base: float = Field(10.0, ge=0)
    demand_step_min: float = Field(2.0)
    demand_step_max: float = Field(6.0)
    demand_window_min: int = Field(4, ge=1)
    demand_seed: int = Field(2021)
    demand: Optional[List[List[float]]] = Field(None, description="显式需求 [场景][时间]，覆盖随机生成")

    @model_validator(mode="after")
    def consistent(self):
        if self.pressure_min > self.pressure_max:
            raise ValueError(f"pressure_min {self.pressure_min} exceeds pressure_max {self.pressure_max}")
        if self.demand_step_min > self.demand_step_max:
            raise ValueError("demand_step_min exceeds demand_step_max")
        if self.demand is not None:
            if len(self.demand) != self.scenarios or any(len(row) != self.Nt for row in self.demand):
                raise ValueError(f"demand must be {self.scenarios} x {self.Nt}")
        return self

    @property
    def dx(self) -> float:
        return self.pipe_length / (self.Nx - 1)

    @property
    def num_elements(self) -> int:
        return self.n_compressors + self.n_pipelines

    @classmethod
    def from_defaults(cls, defaults: Dict[str, Any], **overrides: Any) -> "GasConfig":
        return cls.validated(defaults, **overrides)
