"""
工具函数包

提供了各种通用工具函数：
- 日志配置
- 文件读写与报告行序列化
- 异常定义
"""

from .errors import ResilchkError
from .file import FileHandler
from .logger import Logger, logger

__all__ = [
    'FileHandler',
    'Logger',
    'ResilchkError',
    'logger'
]
