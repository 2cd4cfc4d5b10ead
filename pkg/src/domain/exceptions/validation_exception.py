# src/domain/exceptions/validation_exception.py
from typing import Any, Dict, Optional

from src.domain.exceptions.base_exception import DomainException
from src.schemas.enums.base_enums import ErrorCodeEnum


class ConfigError(DomainException):
    """模型配置非法"""

    def __init__(self, field_name: str, reason: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"invalid configuration field '{field_name}': {reason}",
            error_code=ErrorCodeEnum.CONFIG_ERROR,
            details={**(details or {}), "field_name": field_name}
        )


class TopologyError(DomainException):
    """网络拓扑不一致"""

    def __init__(self, reason: str):
        super().__init__(
            message=f"inconsistent network topology: {reason}",
            error_code=ErrorCodeEnum.TOPOLOGY_ERROR
        )


class ModelFileError(DomainException):
    """模型文件无法解析"""

    def __init__(self, reason: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}"
        super().__init__(
            message=f"cannot read model file {path or ''}{where}: {reason}",
            error_code=ErrorCodeEnum.MODEL_FILE_ERROR,
            details={"path": path, "line": line, "column": column}
        )
