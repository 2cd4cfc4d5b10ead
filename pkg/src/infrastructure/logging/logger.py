# src/infrastructure/logging/logger.py
import logging
import sys
from functools import lru_cache
from typing import Optional

from pythonjsonlogger import jsonlogger

from src.application.config.settings import get_settings

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s"
JSON_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def build_formatter(log_format: str) -> logging.Formatter:
    """json：单行JSON，extra 字段一并输出；其他取值为文本格式"""
    if log_format.lower() == "json":
        return jsonlogger.JsonFormatter(
            JSON_FORMAT,
            rename_fields={"asctime": "timestamp", "levelname": "level", "name": "logger"},
        )
    return logging.Formatter(TEXT_FORMAT)


def setup_logging(level: Optional[str] = None, log_format: Optional[str] = None) -> None:
    """根据配置初始化日志；日志输出到标准错误，数据输出留给标准输出"""
    settings = get_settings()
    level_name = (level or settings.log_level).upper()
    log_level = getattr(logging, level_name, logging.INFO)
    fmt = (log_format or settings.log_format).lower()

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(build_formatter(fmt))

    logging.basicConfig(level=log_level, handlers=[handler], force=True)
    logging.getLogger("src").setLevel(log_level)

    logging.getLogger(__name__).debug(
        f"Logging configured with level: {level_name}, format: {fmt}"
    )


@lru_cache()
def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Get a named logger.

    Args:
        name: Logger name, typically __name__ of the module

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name or __name__)


class LoggerMixin:
    """日志混入类，为其他类提供日志功能"""

    @property
    def logger(self) -> logging.Logger:
        return get_logger(f"{self.__class__.__module__}.{self.__class__.__name__}")


def log_exception(exc: Exception, context: Optional[dict] = None, logger_name: Optional[str] = None) -> None:
    """记录异常日志"""
    logger = get_logger(logger_name)
    logger.error(f"Exception occurred: {exc.__class__.__name__}: {str(exc)}",
                 extra={"context": context or {}}, exc_info=True)
