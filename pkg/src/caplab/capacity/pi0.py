# caplab/capacity/pi0.py
"""
π0 = min_P max_y P(X(y)) 的线性规划

变量 (t, P)，min t s.t. Σ_{x∈X(y)} P(x) ≤ t，ΣP = 1，P ≥ 0；
对偶变量 λ 是输出上的分布，min_x Σ_{y: x∈X(y)} λ_y 给出 π0 的下界。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from ..errors import ConvergenceError
from ..channel.types import Dmc, Pmf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pi0Result:
    value: float
    p_star: Pmf
    dual: np.ndarray
    dual_bound: float

    @property
    def neg_log_value(self) -> float:
        return -math.log(self.value)

    @property
    def gap(self) -> float:
        """原始值与对偶下界之差"""
        return max(0.0, self.value - self.dual_bound)


def _support_indicator(w: Dmc) -> np.ndarray:
    """|Y|×|X| 的 0/1 矩阵，第 y 行为 X(y) 的指示"""
    return w.positive.T.astype(float)


def pi0(w: Dmc) -> Pi0Result:
    """
    求解 π0 线性规划（HiGHS），返回最优 P* 与对偶证书

    Returns:
        Pi0Result: value ∈ (0, 1]
    """
    a = _support_indicator(w)
    n_out, n_in = a.shape

    c = np.zeros(n_in + 1)
    c[0] = 1.0
    a_ub = np.concatenate((-np.ones((n_out, 1)), a), axis=1)
    b_ub = np.zeros(n_out)
    a_eq = np.ones((1, n_in + 1))
    a_eq[0, 0] = 0.0
    b_eq = np.ones(1)
    bounds = [(0.0, None)] * (n_in + 1)

    result = scipy.optimize.linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                                    bounds=bounds, method="highs")
    if result.status != 0:
        raise ConvergenceError(f"π0 线性规划求解失败: {result.message}")

    p = np.clip(result.x[1:], 0.0, None)
    p /= p.sum()
    value = float((a @ p).max())

    dual = np.abs(np.asarray(result.ineqlin.marginals, dtype=float))
    if dual.sum() > 0:
        dual = dual / dual.sum()
    dual_bound = float((a.T @ dual).min())
    if value - dual_bound > 1e-9:
        logger.warning(f"π0 对偶间隙 {value - dual_bound:.3g} 超过 1e-9")
    return Pi0Result(value=value, p_star=Pmf(p), dual=dual, dual_bound=dual_bound)
