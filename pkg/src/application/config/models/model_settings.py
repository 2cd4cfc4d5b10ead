# src/application/config/models/model_settings.py
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

import yaml

from src.infrastructure.logging.logger import get_logger

logger = get_logger(__name__)


class ModelSettings:
    """基准模型默认配置 - 从 model_defaults.yaml 读取"""

    def __init__(self, config_path: Path | None = None):
        self._config_path = config_path or Path(__file__).parent / "model_defaults.yaml"
        self._config: Dict[str, Any] = {}
        self._load_configs()

    def _load_configs(self) -> None:
        """加载配置文件"""
        if not self._config_path.exists():
            logger.warning(f"模型默认配置不存在: {self._config_path}")
            return
        try:
            with open(self._config_path, "r", encoding="utf-8") as f:
                self._config = yaml.safe_load(f) or {}
            logger.debug(f"模型默认配置加载完成: {self._config_path}")
        except yaml.YAMLError as e:
            logger.error(f"加载模型默认配置失败: {e}")
            self._config = {}

    def get_model_defaults(self, model: str) -> Dict[str, Any]:
        """获取某个模型的默认参数（返回副本）"""
        return dict(self._config.get(str(model), {}))

    @property
    def available_models(self) -> list[str]:
        return sorted(self._config)


@lru_cache()
def get_model_settings() -> ModelSettings:
    """获取缓存的模型配置实例"""
    return ModelSettings()
