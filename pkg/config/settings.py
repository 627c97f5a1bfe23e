"""
全局配置文件

配置的优先级（由低到高）：
1. 默认值
2. YAML 配置文件（工作目录下的 resilchk.yaml，或 RESILCHK_CONFIG 指定的路径）
3. 环境变量（RESILCHK_ITER_CAP 等）
4. 命令行参数（由 cli 模块覆盖）
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, ValidationError

from src.utils.file import FileHandler

# 项目根目录
ROOT_DIR = Path(__file__).parent.parent

# 日志目录
LOG_DIR = ROOT_DIR / 'logs'

# 默认配置文件名
CONFIG_FILE_NAME = 'resilchk.yaml'

# 环境变量与字段的对应关系
ENV_FIELDS = {
    'RESILCHK_ITER_CAP': 'iter_cap',
    'RESILCHK_STATE_CAP': 'state_cap',
    'RESILCHK_DEPTH': 'default_depth',
    'RESILCHK_SAMPLES': 'samples',
    'RESILCHK_MAX_WORKERS': 'max_workers',
    'RESILCHK_LOG_LEVEL': 'log_level',
    'RESILCHK_LOG_FILE': 'log_file',
    'RESILCHK_LOG_DIR': 'log_dir',
    'RESILCHK_SEED': 'seed',
}


class Settings(BaseModel):
    """运行配置"""

    # 判定器安全阀：基插入次数上限
    iter_cap: int = Field(default=1_000_000, ge=1)
    # 显式探索的状态数上限
    state_cap: int = Field(default=200_000, ge=1)
    # 弱 barb 与约束检查的默认探索深度
    default_depth: int = Field(default=64, ge=0)
    # 上模拟抽样次数与搜索深度
    samples: int = Field(default=1000, ge=0)
    sim_depth: int = Field(default=6, ge=0)
    max_workers: int = Field(default=4, ge=1)
    log_level: str = "INFO"
    log_file: bool = False
    log_dir: str = str(LOG_DIR)
    seed: int = 0

    def merged(self, **overrides: Any) -> 'Settings':
        """返回应用了非空覆盖项的新配置"""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return Settings(**data)


def _load_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    data = FileHandler.read_yaml(path)
    if not isinstance(data, dict):
        raise ValueError(f"配置文件格式错误: {path}")
    return data


def _load_env() -> Dict[str, Any]:
    data = {}
    for env_name, field_name in ENV_FIELDS.items():
        raw = os.environ.get(env_name)
        if raw is None or raw == '':
            continue
        if field_name == 'log_file':
            data[field_name] = raw.lower() in ('1', 'true', 'yes')
        else:
            data[field_name] = raw
    return data


def load_settings(config_path: Optional[str] = None) -> Settings:
    """
    按优先级加载配置

    Args:
        config_path: 显式指定的 YAML 配置文件路径

    Returns:
        配置实例

    Raises:
        ValueError: 配置值不合法时抛出
    """
    path = config_path or os.environ.get('RESILCHK_CONFIG')
    data = _load_yaml(Path(path) if path else Path.cwd() / CONFIG_FILE_NAME)
    data.update(_load_env())
    try:
        return Settings(**data)
    except ValidationError as e:
        raise ValueError(f"配置值不合法: {e}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """获取缓存的全局配置"""
    return load_settings()


def reload_settings() -> Settings:
    """清除缓存并重新加载配置"""
    get_settings.cache_clear()
    return get_settings()
