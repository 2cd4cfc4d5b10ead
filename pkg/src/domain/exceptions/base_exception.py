# src/domain/exceptions/base_exception.py
from typing import Any, Dict, Optional, Union

from src.schemas.enums.base_enums import ErrorCodeEnum


class DomainException(Exception):
    """
    领域异常基类

    命令行把所有 DomainException 视为输入 / 结构错误（退出码 2）；
    求解器内部的失败（迭代上限、线搜索失败）同样派生于此，由求解器转换为求解状态。
    """

    def __init__(
        self,
        message: str,
        error_code: Union[ErrorCodeEnum, str] = ErrorCodeEnum.DOMAIN_ERROR,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.error_code = str(error_code)
        self.details = details or {}
        super().__init__(self.message)

    def log_extra(self) -> Dict[str, Any]:
        """日志 extra 字段；details 加前缀，避免覆盖 LogRecord 属性"""
        return {"error_code": self.error_code, **{f"detail_{k}": v for k, v in self.details.items()}}

    def __str__(self) -> str:
        return f"{self.error_code}: {self.message}"
