# caplab/bounds/feedback.py
"""
带反馈列表容量的下界

    R*(ρ) = sup_{ξ>0} max_P E0(ξ,P)/(ξ+ρ)
    Calf ≥ R* / (1 + ρR*/log(1/(1-q*)))
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Set

import numpy as np

from ..config_manager import get_config
from ..errors import ParameterError
from ..channel.structure import erasure_positive, q_star
from ..channel.types import Dmc, Pmf
from ..gallager.e0 import E0Result, maximize_e0
from .types import BoundKind, BoundValue

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (math.sqrt(5.0) - 1.0) / 2.0
# ξ 搜索内层 E0 最大化的精度；取值间隙 ≤ INNER_TOL·ξ，目标误差不超过 INNER_TOL
INNER_TOL = 1e-7
INNER_MAX_ITER = 2_000


class E0Curve:
    """
    固定信道上 log ξ ↦ max_P E0(ξ,P) 的缓存

    与 ρ 无关，同一信道的多个 ρ 可共享一条曲线。每个新点从最近的已算点的 P* 出发，
    停滞后只在该点上做投影梯度（目标凸，不做随机重启）。非线程安全。
    """

    def __init__(self, w: Dmc) -> None:
        self.w = w
        self._points: Dict[float, E0Result] = {}

    def __len__(self) -> int:
        return len(self._points)

    def __contains__(self, log_xi: float) -> bool:
        return log_xi in self._points

    def at(self, log_xi: float) -> E0Result:
        if log_xi not in self._points:
            warm = None
            if self._points:
                nearest = min(self._points, key=lambda t: (abs(t - log_xi), t))
                warm = self._points[nearest].p_star
            xi = math.exp(log_xi)
            self._points[log_xi] = maximize_e0(xi, self.w, tol=INNER_TOL,
                                               max_iter=INNER_MAX_ITER, p0=warm,
                                               restarts=0, gap_tol=INNER_TOL * xi)
        return self._points[log_xi]

    def points(self) -> List[float]:
        return sorted(self._points)


@dataclass(frozen=True)
class RStar:
    value: float
    xi: float
    p_star: Pmf
    evaluations: int


def r_star(rho: float, w: Dmc, xi_max: Optional[float] = None,
           xi_min: Optional[float] = None, curve: Optional[E0Curve] = None) -> RStar:
    """
    计算 R*(ρ)

    先在 log ξ ∈ [log ξ_min, log ξ_max] 的等距网格上按 ξ 递增顺序取值（逐点热启动），
    再在最优格点的相邻区间内做黄金分割，log ξ 精度 solver.golden_tol；
    返回本次搜索取值点中的最大者。

    Args:
        rho: ρ > 0
        w: 信道
        xi_max: ξ 上限，默认 solver.xi_max
        xi_min: ξ 下限，默认 solver.xi_min
        curve: 同一信道上已有的 E0 曲线缓存，多个 ρ 共享时传入

    Returns:
        RStar
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    cfg = get_config().solver
    xi_max = cfg.xi_max if xi_max is None else float(xi_max)
    xi_min = cfg.xi_min if xi_min is None else float(xi_min)
    if not 0 < xi_min < xi_max:
        raise ParameterError(f"ξ 区间无效: [{xi_min}, {xi_max}]")

    if curve is None:
        curve = E0Curve(w)
    elif curve.w is not w:
        raise ParameterError("E0 曲线缓存属于另一个信道")
    visited: Set[float] = set()

    def objective(log_xi: float) -> float:
        visited.add(log_xi)
        res = curve.at(log_xi)
        return res.e0_value / (res.rho + rho)

    grid = [float(t) for t in np.linspace(math.log(xi_min), math.log(xi_max),
                                          cfg.xi_grid_points)]
    values = [objective(t) for t in grid]
    i = int(np.argmax(values))

    lo = grid[max(0, i - 1)]
    hi = grid[min(len(grid) - 1, i + 1)]
    c = hi - GOLDEN_RATIO * (hi - lo)
    d = lo + GOLDEN_RATIO * (hi - lo)
    fc, fd = objective(c), objective(d)
    while hi - lo > cfg.golden_tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN_RATIO * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN_RATIO * (hi - lo)
            fd = objective(d)

    best = max(sorted(visited), key=lambda t: (objective(t), -t))
    res = curve.at(best)
    value = max(0.0, objective(best))
    logger.debug(f"R*({rho}) = {value:.9g} at ξ = {res.rho:.6g}, "
                 f"{len(visited)} 个取值点, 曲线缓存 {len(curve)} 点")
    return RStar(value=value, xi=res.rho, p_star=res.p_star, evaluations=len(visited))


def feedback_lower_bound(rho: float, w: Dmc, xi_max: Optional[float] = None,
                         curve: Optional[E0Curve] = None) -> BoundValue:
    """
    Calf 的下界 R*/(1 + ρR*/log(1/(1-q*)))

    q* = 1 时取 R*；Cal 不为正（不存在 W(y|x) > W(y|x') = 0）时为 0。

    Args:
        rho: ρ > 0
        w: 信道
        xi_max: ξ 上限
        curve: 共享的 E0 曲线缓存

    Returns:
        BoundValue
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    if not erasure_positive(w):
        return BoundValue(name="feedback_lower_bound", value=0.0, kind=BoundKind.LOWER)

    rs = r_star(rho, w, xi_max=xi_max, curve=curve)
    qs = q_star(w).value
    if rs.value <= 0:
        value = 0.0
    elif qs >= 1.0:
        value = rs.value
    else:
        value = rs.value / (1.0 + rho * rs.value / -math.log1p(-qs))
    return BoundValue(name="feedback_lower_bound", value=value, kind=BoundKind.LOWER,
                      p_used=rs.p_star)
