# caplab/config_manager.py
# -*- coding: utf-8 -*-
"""
统一配置管理模块
集中管理求解器容差、枚举上限、并发与输出格式
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .errors import ParameterError

logger = logging.getLogger(__name__)

ENV_THREADS = "CAPLAB_THREADS"
ENV_CONFIG = "CAPLAB_CONFIG"


@dataclass
class SolverConfig:
    """求解器配置"""
    tol: float = 1e-9
    max_iter: int = 20_000
    # Blahut-Arimoto
    ba_max_iter: int = 200_000
    # E0 最大化
    e0_restarts: int = 8
    stall_iterations: int = 20
    support_floor: float = 1e-14
    # Forney 多起点
    forney_restarts: int = 8
    forney_max_iter: int = 2_000
    # 常组分界
    const_comp_max_iter: int = 3_000
    # min_V C(V)
    subchannel_outer_iter: int = 5_000
    subchannel_restarts: int = 4
    subchannel_inner_tol: float = 1e-10
    # R*(ρ) 外层搜索
    xi_min: float = 1e-3
    xi_max: float = 1e3
    golden_tol: float = 1e-6
    xi_grid_points: int = 25


@dataclass
class LimitsConfig:
    """规模上限"""
    product_cap: int = 10_000_000
    enumeration_cap: int = 1_000_000
    exhaustive_support_cap: int = 20
    strategy_max_depth: int = 12
    binomial_oracle_cap: int = 1_000_000
    type_enumeration_cap: int = 200_000
    factorization_tol: float = 1e-9


@dataclass
class RuntimeConfig:
    """并发配置"""
    threads: int = 4
    mc_block_size: int = 4096

    def __post_init__(self) -> None:
        env_threads = os.environ.get(ENV_THREADS)
        if env_threads:
            try:
                self.threads = max(1, int(env_threads))
            except ValueError:
                logger.warning(f"忽略无效的 {ENV_THREADS}={env_threads!r}")


@dataclass
class OutputConfig:
    """报告输出配置"""
    float_format: str = "%.12g"
    header: bool = True
    bits: bool = False


@dataclass
class GlobalConfig:
    """全局配置"""
    solver: SolverConfig = field(default_factory=SolverConfig)
    limits: LimitsConfig = field(default_factory=LimitsConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def default(cls) -> GlobalConfig:
        """获取默认配置"""
        return cls()

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> GlobalConfig:
        """从字典构造配置，未知键忽略，缺失键取默认值"""
        data = data or {}
        sections = {
            "solver": SolverConfig,
            "limits": LimitsConfig,
            "runtime": RuntimeConfig,
            "output": OutputConfig,
        }
        kwargs = {}
        for name, section_cls in sections.items():
            raw = data.get(name) or {}
            known = {f.name for f in fields(section_cls)}
            unknown = set(raw) - known
            if unknown:
                logger.warning(f"配置节 {name} 中存在未知键: {sorted(unknown)}")
            kwargs[name] = section_cls(**{k: v for k, v in raw.items() if k in known})
        return cls(**kwargs)


def _get_default_config_path() -> Path:
    """默认配置文件路径：环境变量优先，其次项目根目录 configs/caplab.yaml"""
    env_path = os.environ.get(ENV_CONFIG)
    if env_path:
        return Path(env_path)
    project_root = Path(__file__).resolve().parent.parent.parent
    return project_root / "configs" / "caplab.yaml"


def load_config(path: Optional[str] = None) -> GlobalConfig:
    """
    从 YAML 文件加载配置

    Args:
        path: 配置文件路径，为 None 时使用默认路径；默认路径不存在时返回默认配置

    Returns:
        GlobalConfig: 配置对象
    """
    explicit = path is not None
    config_path = Path(path) if explicit else _get_default_config_path()
    if not config_path.exists():
        if explicit:
            raise FileNotFoundError(f"配置文件不存在: {config_path}")
        return GlobalConfig.default()

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ParameterError(f"加载配置文件失败: {e}") from e
    logger.debug(f"已加载配置文件: {config_path}")
    return GlobalConfig.from_dict(data)


# 全局配置实例
_config: Optional[GlobalConfig] = None


def get_config() -> GlobalConfig:
    """获取全局配置实例"""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def set_config(config: GlobalConfig) -> None:
    """设置全局配置"""
    global _config
    _config = config
