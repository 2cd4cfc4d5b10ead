# src/application/services/service_interface.py
from typing import Optional

from src.application.config.settings import Settings, get_settings
from src.infrastructure.logging.logger import get_logger


class BaseService:
    """
    基础服务 - 专注业务逻辑，不关心命令行解析与退出码
    """
    def __init__(self, settings: Optional[Settings] = None):
        self.logger = get_logger(self.__class__.__name__)
        self.settings = settings or get_settings()
        self.service_name = self.__class__.__name__
