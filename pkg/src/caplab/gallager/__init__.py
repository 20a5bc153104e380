"""
Gallager E0 模块
E0 函数、最优输入分布、Rényi 熵与猜测不等式
"""
from .e0 import (
    E0Problem,
    E0Result,
    LimitDiagnostics,
    cutoff_rate,
    e0,
    e0_derivative_at_zero,
    e0_limit_diagnostics,
    kkt_residual,
    maximize_e0,
    uniform_epsilon_noise_e0_bound,
)
from .renyi import (
    RenyiMaximum,
    RenyiReport,
    escort,
    maximize_renyi_difference,
    renyi_report,
)
from .arikan import GuessingCheck, arikan_bound_check

__all__ = [
    'E0Problem',
    'E0Result',
    'LimitDiagnostics',
    'e0',
    'kkt_residual',
    'maximize_e0',
    'cutoff_rate',
    'e0_limit_diagnostics',
    'e0_derivative_at_zero',
    'uniform_epsilon_noise_e0_bound',
    'RenyiReport',
    'RenyiMaximum',
    'renyi_report',
    'maximize_renyi_difference',
    'escort',
    'GuessingCheck',
    'arikan_bound_check',
]
