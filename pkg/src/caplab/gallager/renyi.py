# caplab/gallager/renyi.py
"""α = 1/(1+ρ) 阶 Rényi 熵与条件 Rényi 熵"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from ..channel.types import Dmc, Pmf
from .e0 import E0Result, _check_rho, maximize_e0

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RenyiReport:
    alpha: float
    h_renyi_x: float
    h_renyi_x_given_y: float
    difference: float


def _log_power_sum(values: np.ndarray, beta: float,
                   axis: Optional[int] = None) -> np.ndarray:
    """log Σ v^β，v = 0 的项为 0"""
    with np.errstate(divide="ignore"):
        return logsumexp(beta * np.log(values), axis=axis)


def renyi_report(rho: float, p: Pmf, w: Dmc) -> RenyiReport:
    """
    H_α(X) = ρ⁻¹ log (Σ_x P(x)^α)^{1+ρ}
    H_α(X|Y) = ρ⁻¹ log Σ_y (Σ_x (P(x)W(y|x))^α)^{1+ρ}
    """
    _check_rho(rho)
    w.check_input(p)
    beta = 1.0 / (1.0 + rho)
    h_x = (1.0 + rho) * float(_log_power_sum(p.probs, beta)) / rho
    joint = p.probs[:, None] * w.matrix
    per_y = _log_power_sum(joint, beta, axis=0)
    h_xy = float(logsumexp((1.0 + rho) * per_y)) / rho
    return RenyiReport(alpha=beta, h_renyi_x=h_x, h_renyi_x_given_y=h_xy,
                       difference=h_x - h_xy)


@dataclass(frozen=True)
class RenyiMaximum:
    p_star: Pmf
    report: RenyiReport
    e0_result: E0Result


def escort(p: Pmf, power: float) -> Pmf:
    """P^power 归一化"""
    with np.errstate(divide="ignore"):
        logs = power * np.log(p.probs)
    logs -= logs.max()
    weights = np.exp(logs)
    return Pmf(weights / weights.sum())


def maximize_renyi_difference(rho: float, w: Dmc,
                              tol: Optional[float] = None) -> RenyiMaximum:
    """
    max_P [H_α(X) - H_α(X|Y)]

    记 Q ∝ P^α，则差值恰为 E0(ρ,Q)/ρ；该映射是单纯形上的双射，
    因此最大点由 E0 最大点 P* 经 P ∝ (P*)^{1+ρ} 得到。
    """
    res = maximize_e0(rho, w, tol=tol)
    p_star = escort(res.p_star, 1.0 + rho)
    report = renyi_report(rho, p_star, w)
    if not math.isclose(report.difference, res.cutoff_rate, rel_tol=1e-6, abs_tol=1e-9):
        logger.warning(f"Rényi 差值 {report.difference} 与截止率 {res.cutoff_rate} 不一致")
    return RenyiMaximum(p_star=p_star, report=report, e0_result=res)
