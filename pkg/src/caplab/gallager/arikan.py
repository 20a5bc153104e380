# caplab/gallager/arikan.py
"""猜测函数矩的下界检验"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..errors import ChannelValidationError, ParameterError


@dataclass(frozen=True)
class GuessingCheck:
    lhs: float
    rhs: float
    holds: bool


def arikan_bound_check(p_xy: np.ndarray, g: np.ndarray, rho: float) -> GuessingCheck:
    """
    E[G(X,Y)^ρ] ≥ (1 + log|X|)^{-ρ} Σ_y (Σ_x P(x,y)^{1/(1+ρ)})^{1+ρ}

    Args:
        p_xy: |X|×|Y| 联合分布
        g: |X|×|Y| 猜测次序表，每列是 {1..|X|} 的一个排列
        rho: ρ > 0

    Returns:
        GuessingCheck: holds = lhs ≥ rhs - 1e-12
    """
    if not rho > 0:
        raise ParameterError(f"ρ 必须为正, 实际 {rho}")
    p_xy = np.asarray(p_xy, dtype=float)
    g = np.asarray(g, dtype=np.int64)
    if p_xy.shape != g.shape:
        raise ChannelValidationError(f"联合分布形状 {p_xy.shape} 与猜测表 {g.shape} 不一致")
    if np.any(p_xy < 0) or abs(p_xy.sum() - 1.0) > 1e-9:
        raise ChannelValidationError("联合分布必须非负且和为 1")
    k = p_xy.shape[0]
    expected = np.arange(1, k + 1)
    for y in range(g.shape[1]):
        if not np.array_equal(np.sort(g[:, y]), expected):
            raise ChannelValidationError(f"第 {y} 列不是 1..{k} 的排列")

    lhs = float(np.sum(p_xy * g.astype(float) ** rho))
    beta = 1.0 / (1.0 + rho)
    with np.errstate(divide="ignore"):
        per_y = logsumexp(beta * np.log(p_xy), axis=0)
    log_rhs = -rho * math.log1p(math.log(k)) + float(logsumexp((1.0 + rho) * per_y))
    rhs = math.exp(log_rhs)
    return GuessingCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - 1e-12)
