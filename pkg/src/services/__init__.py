"""
业务服务包

提供了主要的业务逻辑实现：
- 模型文件解析
- 演算语义与良拟序
- WSTS 判定器
- 敌手耦合与韧性判定
- 案例研究与命令行
"""

from .parser import parse_model, parse_term
from .adversary import builtin, couple, resolve_adversary
from .resilience import check_resilience, err_check, explicit_weak_barbed_bisim

__all__ = [
    'parse_model',
    'parse_term',
    'builtin',
    'couple',
    'resolve_adversary',
    'check_resilience',
    'err_check',
    'explicit_weak_barbed_bisim'
]
