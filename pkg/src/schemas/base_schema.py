# src/schemas/base_schema.py
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field


class BaseSchema(BaseModel):
    """基础Schema类"""

    model_config = ConfigDict(
        use_enum_values=True,
        validate_assignment=True,
        arbitrary_types_allowed=True,
        extra="forbid",
    )


class MetadataMixin(BaseModel):
    """元数据混入"""
    metadata: Dict[str, Any] = Field(default_factory=dict, description="元数据")


def drop_none(values: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """去掉值为 None 的覆盖项（命令行未给出的参数）"""
    return {k: v for k, v in (values or {}).items() if v is not None}


class ConfigSchema(BaseSchema):
    """配置模型：校验失败统一转换为 ConfigError"""

    @classmethod
    def validated(cls, data: Optional[Dict[str, Any]] = None, **overrides: Any):
        from pydantic import ValidationError

        from src.domain.exceptions.validation_exception import ConfigError

        values = {**(data or {}), **drop_none(overrides)}
        try:
            return cls(**values)
        except ValidationError as e:
            first = e.errors()[0]
            field_name = ".".join(str(p) for p in first.get("loc", ())) or cls.__name__
            raise ConfigError(field_name, first.get("msg", str(e)),
                              {"errors": len(e.errors())}) from None
