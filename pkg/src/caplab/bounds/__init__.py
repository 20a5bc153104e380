"""
界模块
Forney 界及其 ρ 推广、常组分界、反馈下界 R*(ρ) 与排序核对
"""
from ..channel.types import AuxChannel
from .types import BoundKind, BoundValue
from .forney import (
    forney_cal_rho_bound,
    forney_ceo_bound,
    forney_variational_form,
    maximize_forney,
    n_letter_forney,
)
from .constant_composition import (
    CalSolution,
    const_comp_bounds,
    const_comp_ceo_bound,
    max_entropy_coupling,
    solve_const_comp_cal,
)
from .feedback import E0Curve, RStar, feedback_lower_bound, r_star
from .comparison import ComparisonReport, bound_comparison_report, compare_random

__all__ = [
    'AuxChannel',
    'BoundKind',
    'BoundValue',
    'forney_ceo_bound',
    'forney_cal_rho_bound',
    'forney_variational_form',
    'maximize_forney',
    'n_letter_forney',
    'CalSolution',
    'const_comp_bounds',
    'const_comp_ceo_bound',
    'max_entropy_coupling',
    'solve_const_comp_cal',
    'E0Curve',
    'RStar',
    'r_star',
    'feedback_lower_bound',
    'ComparisonReport',
    'bound_comparison_report',
    'compare_random',
]
