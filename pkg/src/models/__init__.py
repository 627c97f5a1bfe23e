"""
数据模型包

提供了演算与报告的模型定义：
- 值、表达式、进程项与上下文
- 模型文件声明
- 判定结果与命令行报告
"""

from .terms import *
from .reports import BisimResult, ConstraintReport, RunReport, Verdict, WitnessTrace

__all__ = [
    'BisimResult',
    'ConstraintReport',
    'RunReport',
    'Verdict',
    'WitnessTrace'
]
