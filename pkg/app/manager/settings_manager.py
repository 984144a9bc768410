"""设置管理器，负责加载 settings.json 并应用环境变量覆盖"""

import copy
import json
import os
from typing import Any, Dict

from dotenv import load_dotenv

from app.utils.logger import logger, set_log_level

DEFAULT_SETTINGS: Dict[str, Any] = {
    "engine": {
        "max_outcomes": 2**24,
        "max_subset_bits": 24,
        "max_transform_cells": 2**26,
        "eps_num": 1e-10,
        "real_key_quantum": 1e-12,
    },
    "mc": {
        "seed": 20240601,
        "sample_count": 1_000_000,
        "delta": 0.01,
        "block_size": 65536,
        "workers": 1,
    },
    "bounds": {"inconclusive_band": 0.05},
    "system": {"log_level": "INFO", "allow_origins": ["*"], "api_key": None},
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class SettingsManager:
    """设置管理器，文件里缺失的键回退到默认值"""

    def __init__(self, config_path: str | None = None):
        """初始化设置管理器

        Args:
            config_path: 设置文件路径，缺省为 app/config/settings.json
        """
        load_dotenv()
        self.config_path = config_path or os.path.join(
            os.path.dirname(os.path.dirname(__file__)), "config", "settings.json"
        )
        self.config = self._load_config()
        set_log_level(self.log_level)

    def _load_config(self) -> Dict[str, Any]:
        """加载设置文件并应用环境变量

        Returns:
            Dict[str, Any]: 合并后的设置
        """
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                config = _merge(DEFAULT_SETTINGS, json.load(f))
            logger.debug(f"成功加载设置文件 {self.config_path}")
        except FileNotFoundError:
            logger.warning(f"设置文件不存在，使用默认设置: {self.config_path}")
            config = copy.deepcopy(DEFAULT_SETTINGS)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"加载设置文件失败，使用默认设置: {e}")
            config = copy.deepcopy(DEFAULT_SETTINGS)

        max_outcomes = os.getenv("DEJONG_MAX_OUTCOMES")
        if max_outcomes:
            try:
                config["engine"]["max_outcomes"] = int(max_outcomes)
            except ValueError:
                logger.warning(f"忽略无效的 DEJONG_MAX_OUTCOMES: {max_outcomes}")
        max_cells = os.getenv("DEJONG_MAX_TRANSFORM_CELLS")
        if max_cells:
            try:
                config["engine"]["max_transform_cells"] = int(max_cells)
            except ValueError:
                logger.warning(f"忽略无效的 DEJONG_MAX_TRANSFORM_CELLS: {max_cells}")
        if os.getenv("DEJONG_LOG_LEVEL"):
            config["system"]["log_level"] = os.getenv("DEJONG_LOG_LEVEL")
        if os.getenv("DEJONG_API_KEY"):
            config["system"]["api_key"] = os.getenv("DEJONG_API_KEY")
        return config

    @property
    def engine(self) -> Dict[str, Any]:
        return self.config["engine"]

    @property
    def mc(self) -> Dict[str, Any]:
        return self.config["mc"]

    @property
    def max_outcomes(self) -> int:
        return int(self.engine["max_outcomes"])

    @property
    def max_subset_bits(self) -> int:
        return int(self.engine["max_subset_bits"])

    @property
    def max_transform_cells(self) -> int:
        """子集变换全部中间表的单元总数上限 ∏(1 + |E_i|)"""
        return int(self.engine["max_transform_cells"])

    @property
    def eps_num(self) -> float:
        return float(self.engine["eps_num"])

    @property
    def real_key_quantum(self) -> float:
        return float(self.engine["real_key_quantum"])

    @property
    def inconclusive_band(self) -> float:
        return float(self.config["bounds"]["inconclusive_band"])

    @property
    def log_level(self) -> str:
        return str(self.config["system"].get("log_level", "INFO"))

    @property
    def api_key(self) -> str | None:
        return self.config["system"].get("api_key")

    @property
    def allow_origins(self) -> list:
        return list(self.config["system"].get("allow_origins", ["*"]))

    def get_config(self) -> Dict[str, Any]:
        """获取当前设置，每次都从文件重新加载

        Returns:
            Dict[str, Any]: 当前设置
        """
        self.config = self._load_config()
        return self.config

    def public_config(self) -> Dict[str, Any]:
        """对外展示的设置，去掉 API Key"""
        config = copy.deepcopy(self.config)
        config["system"].pop("api_key", None)
        return config

    def update_config(self, config: Dict[str, Any]) -> None:
        """更新设置并写回文件

        Args:
            config: 新设置（可以只包含部分键）

        Raises:
            ValueError: 设置不是字典
        """
        if not isinstance(config, dict):
            raise ValueError("设置必须是字典")
        self.config = _merge(self.config, config)
        set_log_level(self.log_level)
        with open(self.config_path, "w", encoding="utf-8") as f:
            json.dump(self.config, f, ensure_ascii=False, indent=4)


# 创建全局 SettingsManager 实例
settings_manager = SettingsManager()
