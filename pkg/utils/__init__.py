"""工具模块包.

包含以下子模块：
- logger: 日志配置模块，提供统一的日志配置功能。
- errors: 项目异常层次。
- settings: 路径与环境变量配置。
"""

from .logger import configure_basic_logging, get_logger
