# caplab/capacity/report.py
"""带反馈的各类容量汇总报告"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Optional

from ..errors import ParameterError
from ..channel.structure import (
    ambiguous_output_upper_bound,
    erasure_positive,
    has_positive_zero_error,
)
from ..channel.types import Dmc
from ..gallager.e0 import E0Result, maximize_e0
from .pi0 import Pi0Result, pi0
from .shannon import CapacityResult, shannon_capacity

if TYPE_CHECKING:
    from ..bounds.feedback import E0Curve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CapacityReport:
    """
    容量报告（nats）

    ceo_positive 同时决定 Cal、Calf、Ceo、Ceof 的正性。
    czero_positive 时 calf_exact = calf_upper。
    """
    shannon_c: float
    pi0: float
    neg_log_pi0: float
    czero_positive: bool
    czero_feedback: float
    ceo_positive: bool
    ceo_feedback: float
    calf_upper: float
    calf_exact: Optional[float]
    calf_lower: float
    rho: float
    cutoff_rate: float
    ambiguous_bound: float
    feedback_lower_bound: float
    capacity_gap: float
    kkt_residual: float
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)


def feedback_capacity_report(w: Dmc, rho: float, tol: Optional[float] = None,
                             capacity: Optional[CapacityResult] = None,
                             e0_result: Optional[E0Result] = None,
                             pi0_result: Optional[Pi0Result] = None,
                             curve: Optional[E0Curve] = None) -> CapacityReport:
    """
    汇总 C、π0、Czero/Ceo/Calf（带反馈）

    calf_upper = min(max_P E0/ρ, 模糊输出上界)；
    calf_lower = max(反馈下界, -log π0, 0)。
    已算好的子结果（含 ρ 无关的 E0 曲线缓存）可以直接传入以免重复计算。
    """
    from ..bounds.feedback import feedback_lower_bound

    if not rho > 0:
        raise ParameterError(f"ρ 必须为正, 实际 {rho}")

    capacity = capacity or shannon_capacity(w, tol=tol)
    e0_result = e0_result or maximize_e0(rho, w, tol=tol)
    pi0_result = pi0_result or pi0(w)

    czero_positive = has_positive_zero_error(w)
    ceo_positive = erasure_positive(w)
    neg_log_pi0 = pi0_result.neg_log_value

    amb = ambiguous_output_upper_bound(w, rho)
    cutoff = e0_result.cutoff_rate
    calf_upper = min(cutoff, amb)
    calf_exact = calf_upper if czero_positive else None

    fb = feedback_lower_bound(rho, w, curve=curve).value if ceo_positive else 0.0
    calf_lower = max(fb, neg_log_pi0, 0.0)
    if calf_lower > calf_upper + 1e-9:
        logger.warning(f"Calf 下界 {calf_lower:.9g} 超过上界 {calf_upper:.9g}")

    return CapacityReport(
        shannon_c=capacity.value,
        pi0=pi0_result.value,
        neg_log_pi0=neg_log_pi0,
        czero_positive=czero_positive,
        czero_feedback=neg_log_pi0 if czero_positive else 0.0,
        ceo_positive=ceo_positive,
        ceo_feedback=capacity.value if ceo_positive else 0.0,
        calf_upper=calf_upper,
        calf_exact=calf_exact,
        calf_lower=calf_lower,
        rho=float(rho),
        cutoff_rate=cutoff,
        ambiguous_bound=amb,
        feedback_lower_bound=fb,
        capacity_gap=capacity.gap,
        kkt_residual=e0_result.kkt_residual,
        converged=capacity.converged and e0_result.converged,
    )
