"""
caplab - 离散无记忆信道的列表容量与零错误容量工具

    channel    信道表示、结构分析与化简
    gallager   Gallager E0 函数与截止率
    capacity   Shannon 容量、π0 与带反馈容量报告
    bounds     无反馈界与反馈下界
    listsim    码本、列表矩与反馈方案仿真
"""
from .errors import (
    CaplabError,
    ChannelValidationError,
    ConvergenceError,
    ParameterError,
    SizeCapError,
)
from .config_manager import GlobalConfig, get_config, load_config, set_config
from .channel import Dmc, Pmf, load_channel, parse_channel_string
from .gallager import cutoff_rate, e0, maximize_e0
from .capacity import feedback_capacity_report, pi0, shannon_capacity

__version__ = "0.1.0"

__all__ = [
    'CaplabError',
    'ChannelValidationError',
    'ConvergenceError',
    'ParameterError',
    'SizeCapError',
    'GlobalConfig',
    'get_config',
    'load_config',
    'set_config',
    'Dmc',
    'Pmf',
    'load_channel',
    'parse_channel_string',
    'e0',
    'maximize_e0',
    'cutoff_rate',
    'shannon_capacity',
    'pi0',
    'feedback_capacity_report',
]
