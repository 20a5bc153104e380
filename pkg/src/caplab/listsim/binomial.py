# caplab/listsim/binomial.py
"""
二项随机变量 ρ 阶矩的指数上界与精确值

K 为 e^{nα} 个成功概率 ≤ e^{-nβ} 的独立 Bernoulli 变量之和：

    E[(1+K)^ρ] ≤ 1 + γ e^{n(α-β)}   (β ≥ α)，   γ e^{nρ(α-β)}   (β < α)
    E[K^ρ]     ≤     γ e^{n(α-β)}   (β ≥ α)，   γ e^{nρ(α-β)}   (β < α)

γ = max{e^{e^ρ-1}, (⌈ρ⌉!)²⌈ρ⌉}
"""
from __future__ import annotations

import logging
import math

import numpy as np
from scipy.special import logsumexp
from scipy.stats import binom

from ..config_manager import get_config
from ..errors import ParameterError, SizeCapError

logger = logging.getLogger(__name__)

VARIANTS = ("shifted", "raw")


def log_binomial_gamma(rho: float) -> float:
    """log γ，ρ 较大时 γ 本身会溢出"""
    if not rho > 0:
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    c = math.ceil(rho)
    return max(math.expm1(rho), 2.0 * math.lgamma(c + 1) + math.log(c))


def binomial_gamma(rho: float) -> float:
    """γ = max{e^{e^ρ-1}, (⌈ρ⌉!)²⌈ρ⌉}，超出浮点范围时为 inf"""
    return _exp_or_inf(log_binomial_gamma(rho))


def _exp_or_inf(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def binomial_moment_bound(n: int, alpha: float, beta: float, rho: float,
                          variant: str = "shifted") -> float:
    """
    上界的取值

    Args:
        n: 分组长度
        alpha: 变量个数 e^{nα}，α > 0
        beta: 成功概率上界 e^{-nβ}，β ≥ 0
        rho: ρ > 0
        variant: shifted 对应 E[(1+K)^ρ]，raw 对应 E[K^ρ]

    Returns:
        float
    """
    if n < 1:
        raise ParameterError(f"n 必须 ≥ 1, 实际 {n}")
    if not alpha > 0:
        raise ParameterError(f"α 必须 > 0, 实际 {alpha}")
    if not beta >= 0:
        raise ParameterError(f"β 必须 ≥ 0, 实际 {beta}")
    if variant not in VARIANTS:
        raise ParameterError(f"未知的变体: {variant}. 可选: {list(VARIANTS)}")

    log_gamma = log_binomial_gamma(rho)
    if beta >= alpha:
        value = _exp_or_inf(log_gamma + n * (alpha - beta))
        return 1.0 + value if variant == "shifted" else value
    value = _exp_or_inf(log_gamma + n * rho * (alpha - beta))
    if math.isinf(value):
        logger.warning(f"二项矩界超出浮点范围: log 值 {log_gamma + n * rho * (alpha - beta):.6g}")
    return value


def binomial_moment_oracle(trials: int, p: float, rho: float,
                           shifted: bool = True) -> float:
    """
    E[(1+K)^ρ]（shifted）或 E[K^ρ]，K ~ Binomial(N, p)，按概率质量函数直接求和

    对数域逐项计算，最后用 math.fsum 做补偿求和；N 超过 limits.binomial_oracle_cap 时拒绝。
    """
    if trials < 0:
        raise ParameterError(f"N 必须 ≥ 0, 实际 {trials}")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p 必须在 [0, 1] 内, 实际 {p}")
    if not rho > 0:
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    cap = get_config().limits.binomial_oracle_cap
    if trials > cap:
        raise SizeCapError(f"N = {trials} 超过精确求和上限 {cap}")

    k = np.arange(trials + 1)
    log_pmf = binom.logpmf(k, trials, p)
    base = k + (1 if shifted else 0)
    with np.errstate(divide="ignore"):
        log_terms = log_pmf + rho * np.log(base.astype(float))
    live = np.isfinite(log_terms)
    if not live.any():
        return 0.0
    peak = float(logsumexp(log_terms[live]))
    return math.exp(peak) * math.fsum(np.exp(log_terms[live] - peak))
