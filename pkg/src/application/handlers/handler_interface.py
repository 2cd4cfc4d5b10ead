# src/application/handlers/handler_interface.py
import argparse
import sys
from typing import TextIO

from src.domain.exceptions.base_exception import DomainException
from src.infrastructure.logging.logger import get_logger, log_exception

EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_INVALID_INPUT = 2


class BaseHandler:
    """
    命令处理器基类：编排服务调用并把结果映射为退出码。

    0 成功；1 求解失败或意外错误；2 解析 / 校验错误（DomainException）。
    """

    def __init__(self, stdout: TextIO = None, stderr: TextIO = None):
        self.logger = get_logger(self.__class__.__name__)
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr

    def handle(self, args: argparse.Namespace) -> int:
        """处理命令的通用模板方法"""
        command = getattr(args, "command", None)
        try:
            self.logger.debug("开始处理命令", extra={"command": command})
            code = self._process(args)
            self.logger.debug("命令处理结束", extra={"command": command, "exit_code": code})
            return code
        except DomainException as e:
            self.logger.error(f"输入无效: {e.message}", extra=e.log_extra())
            self.stderr.write(f"error: {e}\n")
            return EXIT_INVALID_INPUT
        except Exception as e:
            log_exception(e, {"command": command}, self.__class__.__name__)
            self.stderr.write(f"error: {e.__class__.__name__}: {e}\n")
            return EXIT_SOLVER_FAILURE

    def _process(self, args: argparse.Namespace) -> int:
        """子类需要实现的具体处理逻辑"""
        raise NotImplementedError("子类必须实现 _process 方法")

    def emit(self, text: str) -> None:
        self.stdout.write(text if text.endswith("\n") else text + "\n")
        self.stdout.flush()
