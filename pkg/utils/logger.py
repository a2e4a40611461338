#!/usr/bin/env python
"""日志配置模块.

该模块提供了统一的日志配置功能，用于整个项目的日志记录。
"""

import logging
import os

from utils.settings import LOGS_DIR

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# 确保日志目录存在
os.makedirs(LOGS_DIR, exist_ok=True)

# 由get_logger创建的logger名称
_MANAGED: set[str] = set()


def get_logger(name: str, log_file: str | None = None, level: int = logging.INFO) -> logging.Logger:
    """获取配置好的logger实例.

    Args:
        name: logger名称，通常使用__name__
        log_file: 日志文件名，如果不指定，则只输出到控制台
        level: 日志级别，默认为INFO

    Returns:
        配置好的logger实例
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    _MANAGED.add(name)

    # 避免重复添加handler
    if logger.handlers:
        return logger

    formatter = logging.Formatter(LOG_FORMAT)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(LOGS_DIR / log_file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # 已有专属handler，不再向root重复输出
    logger.propagate = False
    return logger


def configure_basic_logging(log_file: str = "shallow_scaling.log", level: int = logging.INFO) -> None:
    """配置根logger，供命令行入口使用.

    Args:
        log_file: 日志文件名
        level: 日志级别
    """
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(LOGS_DIR / log_file, encoding="utf-8"),
        ],
        force=True,
    )
    # 只同步通过get_logger创建的logger，其他库的logger保持原级别
    for name in sorted(_MANAGED):
        logging.getLogger(name).setLevel(level)
