"""
resilchk: 进程演算韧性验证工具

提供了以下功能：
- 带位置的值传递进程演算（解析、结构同余、归约、barb）
- 良拟序与上闭集基的运算
- WSTS 覆盖/次覆盖判定
- 敌手模型与耦合系统
- 韧性判定与三个案例研究
"""

__version__ = "0.1.0"
