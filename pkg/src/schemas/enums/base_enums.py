# src/schemas/enums/base_enums.py
from enum import Enum


class BaseEnum(str, Enum):
    """基础枚举类，继承str使其可以直接序列化为字符串"""

    def __str__(self) -> str:
        return self.value

    @classmethod
    def list_values(cls) -> list[str]:
        """获取所有枚举值列表"""
        return [item.value for item in cls]

    @classmethod
    def has_value(cls, value: str) -> bool:
        """检查值是否存在于枚举中"""
        return value in cls.list_values()


class ErrorCodeEnum(BaseEnum):
    """错误代码枚举"""
    # 通用错误
    DOMAIN_ERROR = "DOMAIN_ERROR"

    # 表达式 / 自动微分
    EXPRESSION_DOMAIN = "EXPRESSION_DOMAIN"
    UNBOUND_VARIABLE = "UNBOUND_VARIABLE"
    EXPRESSION_FORMAT = "EXPRESSION_FORMAT"

    # 图模型
    CROSS_NODE_EXPRESSION = "CROSS_NODE_EXPRESSION"
    SINGLE_NODE_LINK = "SINGLE_NODE_LINK"
    UNREACHABLE_NODE = "UNREACHABLE_NODE"
    DUPLICATE_NODE_ID = "DUPLICATE_NODE_ID"
    LENGTH_MISMATCH = "LENGTH_MISMATCH"
    EMPTY_PART = "EMPTY_PART"
    INVALID_PART_COUNT = "INVALID_PART_COUNT"
    UNKNOWN_VARIABLE = "UNKNOWN_VARIABLE"

    # 线性代数
    STRUCTURALLY_SINGULAR = "STRUCTURALLY_SINGULAR"
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"

    # KKT 后端
    NON_AFFINE_LINK = "NON_AFFINE_LINK"
    NOT_TWO_STAGE = "NOT_TWO_STAGE"
    SINGULAR_BLOCK = "SINGULAR_BLOCK"
    SINGULAR_SCHUR = "SINGULAR_SCHUR"
    SINGULAR_KKT = "SINGULAR_KKT"

    # 求解器
    MAX_ITERATIONS = "MAX_ITERATIONS"
    LINE_SEARCH_FAILURE = "LINE_SEARCH_FAILURE"
    BACKEND_ERROR = "BACKEND_ERROR"

    # 配置与文件
    CONFIG_ERROR = "CONFIG_ERROR"
    TOPOLOGY_ERROR = "TOPOLOGY_ERROR"
    MODEL_FILE_ERROR = "MODEL_FILE_ERROR"
