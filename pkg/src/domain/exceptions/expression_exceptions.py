# src/domain/exceptions/expression_exceptions.py
from typing import Any, Dict, Optional

from src.domain.exceptions.base_exception import DomainException
from src.schemas.enums.base_enums import ErrorCodeEnum


class DomainError(DomainException):
    """表达式在定义域外求值（log 非正、除零、实指数底数非正）"""

    def __init__(self, operation: str, value: float, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"'{operation}' evaluated outside its domain at argument {value!r}",
            error_code=ErrorCodeEnum.EXPRESSION_DOMAIN,
            details={**(details or {}), "operation": operation, "value": value}
        )


class UnboundVariableError(DomainException, IndexError):
    """变量未绑定全局索引，或索引超出求值点长度"""

    def __init__(self, node_id: Any, local_index: int, global_index: Optional[int] = None, size: Optional[int] = None):
        if global_index is None:
            message = f"variable {local_index} of node '{node_id}' has no global index"
        else:
            message = (f"variable {local_index} of node '{node_id}' has global index "
                       f"{global_index} outside a point of length {size}")
        super().__init__(
            message=message,
            error_code=ErrorCodeEnum.UNBOUND_VARIABLE,
            details={"node_id": node_id, "local_index": local_index, "global_index": global_index}
        )


class ExpressionFormatError(DomainException):
    """s-表达式格式错误"""

    def __init__(self, reason: str, fragment: Any = None):
        super().__init__(
            message=f"malformed expression: {reason}",
            error_code=ErrorCodeEnum.EXPRESSION_FORMAT,
            details={"fragment": repr(fragment)[:200]}
        )
