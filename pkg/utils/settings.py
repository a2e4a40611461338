#!/usr/bin/env python
"""运行环境配置模块.

从项目根目录的 .env 文件和环境变量中读取配置，集中管理路径类常量。
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# 加载环境变量
load_dotenv()

# 项目根目录
PROJECT_ROOT = Path(__file__).parent.parent.absolute()

# 配置目录
CONFIG_DIR = PROJECT_ROOT / "config"
PRESETS_FILE = CONFIG_DIR / "presets.json"
REFERENCE_DIR = CONFIG_DIR / "reference"

# 日志目录，可通过 SHALLOW_LOG_DIR 覆盖
LOGS_DIR = Path(os.getenv("SHALLOW_LOG_DIR", str(PROJECT_ROOT / "logs")))

# 默认输出目录
OUTPUT_DIR = PROJECT_ROOT / "output"


def cifar10_root() -> Path | None:
    """返回 CIFAR-10 数据集根目录.

    每次调用时重新读取环境变量，便于测试中临时修改。

    Returns:
        Path | None: CIFAR10_ROOT 指向的目录，未配置时返回None。
    """
    root = os.getenv("CIFAR10_ROOT")
    if not root:
        return None
    return Path(root)
