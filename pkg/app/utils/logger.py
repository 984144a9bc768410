import logging
import sys
from typing import Optional, TextIO

import colorlog

LOG_FORMAT = "%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}


def setup_logger(name: str = "DeJong", stream: Optional[TextIO] = None) -> logging.Logger:
    """创建彩色 logger，日志写到 stderr，stdout 只留给报告

    Args:
        name (str, optional): logger 的名称. Defaults to "DeJong".
        stream (Optional[TextIO], optional): 输出流. Defaults to sys.stderr.

    Returns:
        logging.Logger: 配置好的 logger 实例（重复调用返回同一个实例）
    """
    logger_instance = colorlog.getLogger(name)
    if logger_instance.handlers:
        return logger_instance

    stream = stream or sys.stderr
    handler = logging.StreamHandler(stream)
    handler.setLevel(logging.DEBUG)
    # 非终端（重定向到文件、CI）时 colorlog 自动去掉颜色
    handler.setFormatter(
        colorlog.ColoredFormatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S", log_colors=LOG_COLORS, stream=stream)
    )

    logger_instance.setLevel(logging.DEBUG)
    logger_instance.addHandler(handler)
    logger_instance.propagate = False
    return logger_instance


def set_log_level(level: str) -> None:
    """按名称调整全局 logger 的级别，未知名称回退到 INFO"""
    logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))


logger = setup_logger()
