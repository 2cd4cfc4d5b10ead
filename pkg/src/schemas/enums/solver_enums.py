# src/schemas/enums/solver_enums.py
from src.schemas.enums.base_enums import BaseEnum


class BackendEnum(BaseEnum):
    """KKT 后端"""
    MONOLITHIC = "monolithic"
    SCHUR_DUAL = "schur_dual"
    SCHUR_TREE = "schur_tree"

    @classmethod
    def parse(cls, value: str) -> "BackendEnum":
        """接受命令行写法 schur-dual / schur-tree"""
        return cls(value.strip().lower().replace("-", "_"))


class SolveStatusEnum(BaseEnum):
    """求解状态"""
    OPTIMAL = "optimal"
    MAX_ITER = "max_iter"
    INFEASIBLE_STEP = "infeasible_step"
    ERROR = "error"


class ConstraintKindEnum(BaseEnum):
    """约束类型"""
    EQUALITY = "equality"
    INEQUALITY = "inequality"


class ModelKindEnum(BaseEnum):
    """基准模型"""
    PID = "pid"
    GAS = "gas"


class ExportFormatEnum(BaseEnum):
    """结构导出格式"""
    DOT = "dot"
    ADJACENCY_CSV = "adjacency-csv"


class PidOrderingEnum(BaseEnum):
    """PID 节点构造顺序"""
    SCENARIO_MAJOR = "scenario_major"
    TIME_MAJOR = "time_major"
