# src/schemas/dtos/response/solve_report.py
from typing import Any, ClassVar, Dict, List, Optional

from pydantic import Field, field_validator

from src.schemas.base_schema import BaseSchema, MetadataMixin
from src.schemas.enums.solver_enums import SolveStatusEnum


class SolveTimings(BaseSchema):
    """各阶段耗时（秒）"""
    function_eval: float = Field(0.0, ge=0)
    derivative_eval: float = Field(0.0, ge=0)
    linear_solve: float = Field(0.0, ge=0)
    total: float = Field(0.0, ge=0)


class SolveReport(BaseSchema, MetadataMixin):
    """单次求解的结果"""

    status: SolveStatusEnum = Field(..., description="求解状态")
    objective: float = Field(float("nan"), description="目标函数值")
    iterations: int = Field(0, ge=0, description="迭代次数")
    kkt_error: float = Field(float("inf"), description="最终缩放 KKT 误差")
    mu: float = Field(0.0, ge=0, description="最终障碍参数")
    backend: str = Field("monolithic", description="KKT 后端")
    threads: int = Field(1, ge=1)
    timings: SolveTimings = Field(default_factory=SolveTimings)
    schur_dimension: Optional[int] = Field(None, ge=0, description="Schur 补维数（Schur 后端）")
    inertia_corrections: int = Field(0, ge=0)
    message: str = Field("", description="失败时的错误信息")
    error_code: Optional[str] = Field(None)
    x: List[float] = Field(default_factory=list, description="原始变量")
    lam: List[float] = Field(default_factory=list, description="约束乘子")

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatusEnum.OPTIMAL.value

    def summary(self) -> Dict[str, Any]:
        """不含解向量的摘要"""
        return self.model_dump(exclude={"x", "lam"})


class RunReport(BaseSchema):
    """基准/求解记录的一行 CSV"""

    COLUMNS: ClassVar[List[str]] = [
        "model", "backend", "threads", "status", "iterations", "objective",
        "total_time", "linear_time", "function_time",
        "total_per_iter", "linear_per_iter", "schur_dimension", "repeats",
    ]

    model: str
    backend: str
    threads: int = Field(..., ge=1)
    status: str
    iterations: int = Field(..., ge=0)
    objective: float
    total_time: float = Field(..., ge=0)
    linear_time: float = Field(..., ge=0)
    function_time: float = Field(..., ge=0)
    total_per_iter: float = Field(0.0, ge=0)
    linear_per_iter: float = Field(0.0, ge=0)
    schur_dimension: Optional[int] = None
    repeats: int = Field(1, ge=1)

    @field_validator("total_per_iter", "linear_per_iter", mode="before")
    @classmethod
    def non_negative(cls, v):
        return max(float(v), 0.0)

    @classmethod
    def from_report(cls, model: str, report: SolveReport, repeats: int = 1) -> "RunReport":
        t = report.timings
        iters = max(report.iterations, 1)
        return cls(
            model=model,
            backend=report.backend,
            threads=report.threads,
            status=report.status,
            iterations=report.iterations,
            objective=report.objective,
            total_time=t.total,
            linear_time=t.linear_solve,
            function_time=t.function_eval + t.derivative_eval,
            total_per_iter=t.total / iters,
            linear_per_iter=t.linear_solve / iters,
            schur_dimension=report.schur_dimension,
            repeats=repeats,
        )

    def row(self) -> List[Any]:
        return ["" if getattr(self, c) is None else getattr(self, c) for c in self.COLUMNS]
