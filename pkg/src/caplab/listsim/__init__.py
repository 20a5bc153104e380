"""
列表仿真模块
码本与反馈策略、列表长度矩的精确与 Monte Carlo 计算、两种反馈方案与二项矩界
"""
from .codes import (
    Codebook,
    FeedbackStrategy,
    dump_codebook,
    list_sets,
    load_code_file,
    load_codebook,
    load_strategy,
    log_likelihoods,
    zero_error_pair_code,
)
from .moments import (
    CutoffLowerBound,
    MomentReport,
    cutoff_moment_lower_bound,
    exact_moments,
    mc_moments,
)
from .schemes import (
    Thm4Result,
    TypeSchemeResult,
    message_count,
    simulate_thm4_scheme,
    simulate_type_scheme,
    thm4_rate_ladder,
)
from .binomial import (
    binomial_gamma,
    binomial_moment_bound,
    binomial_moment_oracle,
    log_binomial_gamma,
)

__all__ = [
    'Codebook',
    'FeedbackStrategy',
    'dump_codebook',
    'list_sets',
    'load_code_file',
    'load_codebook',
    'load_strategy',
    'log_likelihoods',
    'zero_error_pair_code',
    'CutoffLowerBound',
    'MomentReport',
    'cutoff_moment_lower_bound',
    'exact_moments',
    'mc_moments',
    'Thm4Result',
    'TypeSchemeResult',
    'message_count',
    'simulate_thm4_scheme',
    'simulate_type_scheme',
    'thm4_rate_ladder',
    'binomial_gamma',
    'binomial_moment_bound',
    'binomial_moment_oracle',
    'log_binomial_gamma',
]
