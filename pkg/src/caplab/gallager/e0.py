# caplab/gallager/e0.py
"""
Gallager E0 函数及其对输入分布的最大化

E0(ρ,P) = -log Σ_y (Σ_x P(x) W(y|x)^{1/(1+ρ)})^{1+ρ}

全部在对数域计算，ρ 取到 10³ 量级也不会下溢。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from ..config_manager import get_config
from ..errors import ConvergenceError, ParameterError
from ..channel.types import Dmc, Pmf
from ..parallel import run_tasks
from ..simplex import dirichlet_starts, pick_best, project_to_simplex

logger = logging.getLogger(__name__)


def _check_rho(rho: float, allow_zero: bool = False) -> None:
    if allow_zero and rho == 0:
        return
    if not (rho > 0 and math.isfinite(rho)):
        bound = "≥ 0" if allow_zero else "> 0"
        raise ParameterError(f"ρ 必须 {bound}, 实际 {rho}")


@dataclass(frozen=True)
class E0Result:
    """E0 最大化结果"""
    rho: float
    p_star: Pmf
    e0_value: float
    cutoff_rate: float
    kkt_residual: float
    iterations: int
    converged: bool = True
    method: str = "multiplicative"
    value_gap: float = math.inf

    def require_converged(self) -> E0Result:
        if not self.converged:
            raise ConvergenceError(
                f"E0 最大化未收敛 (ρ={self.rho}, 残差 {self.kkt_residual:.3g})",
                result=self, residual=self.kkt_residual)
        return self


class E0Problem:
    """固定 ρ 与 W 的 E0 计算核，缓存 W^{1/(1+ρ)}"""

    def __init__(self, rho: float, matrix: np.ndarray) -> None:
        self.rho = float(rho)
        self.matrix = np.asarray(matrix, dtype=float)
        beta = 1.0 / (1.0 + self.rho)
        with np.errstate(divide="ignore"):
            self.log_wpow = np.log(self.matrix) * beta
        self.wpow = np.where(self.matrix > 0, np.exp(self.log_wpow), 0.0)

    def log_alpha(self, p: np.ndarray) -> np.ndarray:
        """log α_y(P)，α_y = 0 时为 -inf"""
        with np.errstate(divide="ignore"):
            return np.log(p @ self.wpow)

    def value(self, p: np.ndarray) -> float:
        if self.rho == 0:
            return 0.0
        return float(-logsumexp((1.0 + self.rho) * self.log_alpha(p)))

    def ratios(self, p: np.ndarray) -> Tuple[np.ndarray, float]:
        """
        r(x) = s(x) / Σ_y α_y^{1+ρ}，其中 s(x) = Σ_y W(y|x)^{1/(1+ρ)} α_y^ρ

        Returns:
            (r, E0 值)
        """
        la = self.log_alpha(p)
        log_total = float(logsumexp((1.0 + self.rho) * la))
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.log_wpow + self.rho * la[None, :]
            log_s = logsumexp(terms, axis=1)
        return np.exp(log_s - log_total), -log_total


def _slack_residual(p: np.ndarray, r: np.ndarray, floor: float = 0.0) -> float:
    slack = 1.0 - r
    residual = max(0.0, float(slack.max()))
    on = p > floor
    if on.any():
        residual = max(residual, float(np.abs(slack[on]).max()))
    return residual


def _value_gap(r: np.ndarray, rho: float) -> float:
    """
    max_P' E0(ρ,P') - E0(ρ,P) 的上界 -log(1 + (1+ρ)(min r - 1))

    由 Σ_y α_y^{1+ρ} 对 P 的凸性与 Σ_x P(x) r(x) = 1 得到；min r ≤ 1，故界非负。
    """
    shift = (1.0 + rho) * (float(r.min()) - 1.0)
    return max(0.0, -math.log1p(shift)) if shift > -1.0 else math.inf


def _gap_reached(r: np.ndarray, rho: float, gap_tol: Optional[float]) -> bool:
    return gap_tol is not None and _value_gap(r, rho) <= gap_tol


# ========== 基本函数 ==========
def e0(rho: float, p: Pmf, w: Dmc) -> float:
    """
    Gallager 函数 E0(ρ,P)，单位 nats

    Args:
        rho: ρ ≥ 0
        p: 输入分布
        w: 信道

    Returns:
        float: E0(0,P) = 0
    """
    _check_rho(rho, allow_zero=True)
    w.check_input(p)
    if rho == 0:
        return 0.0
    return E0Problem(rho, w.matrix).value(p.probs)


def kkt_residual(rho: float, p: Pmf, w: Dmc) -> Tuple[float, np.ndarray]:
    """
    最优性条件残差

    slack(x) = 1 - Σ_y W(y|x)^{1/(1+ρ)} α_y^ρ / Σ_y α_y^{1+ρ}
    （原始松弛量除以 Σ_y α_y^{1+ρ} ≤ 1，符号与零点不变）。
    P 最优当且仅当所有 slack ≤ 0，且在 supp(P) 上 slack = 0。

    Returns:
        (residual, 每个输入的 slack)
    """
    _check_rho(rho)
    w.check_input(p)
    r, _ = E0Problem(rho, w.matrix).ratios(p.probs)
    return _slack_residual(p.probs, r), 1.0 - r


# ========== 最大化 ==========
@dataclass
class _Iterate:
    p: np.ndarray
    value: float
    residual: float
    iterations: int
    converged: bool
    method: str


def _multiplicative_ascent(problem: E0Problem, p: np.ndarray, tol: float,
                           max_iter: int, stall_limit: int, floor: float,
                           gap_tol: Optional[float] = None) -> _Iterate:
    """
    乘性不动点迭代 P'(x) ∝ P(x)·r(x)^{-κ}，κ 初值 1/ρ，带回溯

    不动点处 supp(P) 上 r ≡ 1；质量低于 floor 且 r > 1 的输入被截断为 0，
    截断后若 r < 1 则重新激活。
    """
    rho = problem.rho
    kappa = 1.0 / rho
    kappa_max = 100.0 / rho
    r, value = problem.ratios(p)
    # 舍入误差范围内的下降视为持平
    slack_tol = 1e-15 * max(1.0, abs(value))
    stall = 0
    for it in range(max_iter):
        residual = _slack_residual(p, r, floor)
        if residual <= tol or _gap_reached(r, problem.rho, gap_tol):
            return _Iterate(p, value, residual, it, True, "multiplicative")

        dead = (p == 0) & (r < 1.0 - tol)
        if dead.any():
            p = p.copy()
            p[dead] = max(1e-6, 1e-3 * float(p.max()))
            p /= p.sum()
            r, value = problem.ratios(p)
            continue

        on = p > 0
        log_p = np.log(p[on])
        log_r = np.log(r[on])
        accepted = False
        step = kappa
        for _ in range(60):
            cand_log = log_p - step * log_r
            cand_log -= cand_log.max()
            cand = np.zeros_like(p)
            cand[on] = np.exp(cand_log)
            cand /= cand.sum()
            cand_r, cand_value = problem.ratios(cand)
            if cand_value >= value - slack_tol:
                accepted = True
                break
            step *= 0.5

        if not accepted:
            stall += 1
            if stall >= stall_limit:
                break
            continue

        cand_residual = _slack_residual(cand, cand_r, floor)
        improved = cand_value > value or cand_residual < residual
        stall = 0 if improved else stall + 1
        p, r, value = cand, cand_r, cand_value
        kappa = min(kappa_max, step * 2.0) if step == kappa else step

        drop = (p > 0) & (p < floor) & (r > 1.0)
        if drop.any():
            p = p.copy()
            p[drop] = 0.0
            p /= p.sum()
            r, value = problem.ratios(p)

        if stall >= stall_limit:
            break

    residual = _slack_residual(p, r, floor)
    done = residual <= tol or _gap_reached(r, problem.rho, gap_tol)
    return _Iterate(p, value, residual, max_iter, done, "multiplicative")


def _projected_gradient(problem: E0Problem, p: np.ndarray, tol: float,
                        max_iter: int, floor: float,
                        gap_tol: Optional[float] = None) -> _Iterate:
    """投影梯度上升 + Armijo 回溯；∂E0/∂P(x) = -(1+ρ) r(x)"""
    r, value = problem.ratios(p)
    step = 1.0
    for it in range(max_iter):
        residual = _slack_residual(p, r, floor)
        if residual <= tol or _gap_reached(r, problem.rho, gap_tol):
            return _Iterate(p, value, residual, it, True, "projected_gradient")
        grad = -(1.0 + problem.rho) * r
        accepted = False
        for _ in range(60):
            cand = project_to_simplex(p + step * grad)
            cand_r, cand_value = problem.ratios(cand)
            if cand_value >= value + 1e-4 * float(grad @ (cand - p)):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        p, r, value = cand, cand_r, cand_value
        step *= 2.0
    residual = _slack_residual(p, r, floor)
    done = residual <= tol or _gap_reached(r, problem.rho, gap_tol)
    return _Iterate(p, value, residual, max_iter, done, "projected_gradient")


def maximize_e0(rho: float, w: Dmc, tol: Optional[float] = None,
                max_iter: Optional[int] = None,
                p0: Optional[Pmf] = None,
                restarts: Optional[int] = None,
                gap_tol: Optional[float] = None) -> E0Result:
    """
    计算 max_P E0(ρ,P) 及截止率 max_P E0(ρ,P)/ρ

    目标 Σ_y α_y^{1+ρ} 对 P 是凸的，最优性条件给出全局证书。
    主算法为乘性不动点迭代，自均匀分布出发；停滞时转入投影梯度，
    并附加 solver.e0_restarts 个 Dirichlet(1) 起点，按 (值, 字典序 P) 合并。
    给出 gap_tol 时，取值间隙证书 ≤ gap_tol 也视为收敛（不要求支撑外的输入精确归零）。

    Args:
        rho: ρ > 0
        w: 信道
        tol: 残差容限，默认 solver.tol
        max_iter: 迭代上限，默认 solver.max_iter
        p0: 初始分布，默认均匀
        restarts: 停滞后附加的随机起点个数，默认 solver.e0_restarts
        gap_tol: 取值间隙容限（nats），默认不启用

    Returns:
        E0Result
    """
    _check_rho(rho)
    cfg = get_config().solver
    tol = cfg.tol if tol is None else tol
    max_iter = cfg.max_iter if max_iter is None else max_iter
    problem = E0Problem(rho, w.matrix)
    k = w.input_size
    restarts = cfg.e0_restarts if restarts is None else restarts
    start = np.full(k, 1.0 / k) if p0 is None else np.array(p0.probs, dtype=float)

    best = _multiplicative_ascent(problem, start, tol, max_iter,
                                  cfg.stall_iterations, cfg.support_floor, gap_tol)
    if not best.converged:
        logger.debug(f"乘性迭代停滞 (ρ={rho}, 残差 {best.residual:.3g})，转入投影梯度多起点")
        starts = [best.p]
        if restarts > 0:
            starts += dirichlet_starts(k, restarts, seed=0)
        runs = run_tasks(
            lambda s: _projected_gradient(problem, s, tol, max_iter, cfg.support_floor,
                                          gap_tol),
            starts)
        by_value = pick_best([(it.value, it.p) for it in [best] + runs])
        winner = next(it for it in [best] + runs if it.p is by_value[1])
        best = _Iterate(winner.p, winner.value, winner.residual,
                        best.iterations + sum(it.iterations for it in runs),
                        winner.converged, winner.method)
    if not best.converged:
        logger.warning(f"E0 最大化未收敛: ρ={rho}, 残差 {best.residual:.3g}")

    p_star = Pmf(best.p)
    r, _ = problem.ratios(best.p)
    return E0Result(
        rho=float(rho),
        p_star=p_star,
        e0_value=best.value,
        cutoff_rate=best.value / rho,
        kkt_residual=best.residual,
        iterations=best.iterations,
        converged=best.converged,
        method=best.method,
        value_gap=_value_gap(r, rho),
    )


def cutoff_rate(rho: float, w: Dmc, **kwargs: Any) -> float:
    """max_P E0(ρ,P)/ρ"""
    return maximize_e0(rho, w, **kwargs).cutoff_rate


# ========== 极限诊断 ==========
@dataclass(frozen=True)
class LimitDiagnostics:
    """max_P E0(ρ,P)/ρ 随 ρ 的变化及两端参考值"""
    table: pd.DataFrame
    shannon_capacity: float
    neg_log_pi0: float
    monotone: bool


def e0_limit_diagnostics(w: Dmc, rho_grid: Sequence[float],
                         tol: Optional[float] = None) -> LimitDiagnostics:
    """
    在 ρ 网格上计算截止率，ρ→0 端对照 C，ρ→∞ 端对照 -log π0
    """
    from ..capacity.pi0 import pi0
    from ..capacity.shannon import shannon_capacity

    grid = [float(r) for r in rho_grid]
    if not grid or any(r <= 0 for r in grid):
        raise ParameterError(f"ρ 网格必须为正: {grid}")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ParameterError("ρ 网格必须递增排列")

    results = run_tasks(lambda r: maximize_e0(r, w, tol=tol), grid)
    values = [res.cutoff_rate for res in results]
    monotone = all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
    if not monotone:
        logger.warning(f"截止率在 ρ 网格上不单调: {values}")

    capacity = shannon_capacity(w).value
    neg_log_pi0 = pi0(w).neg_log_value
    table = pd.DataFrame({
        "rho": grid,
        "cutoff_rate": values,
        "kkt_residual": [res.kkt_residual for res in results],
        "gap_to_capacity": [capacity - v for v in values],
        "gap_to_neg_log_pi0": [v - neg_log_pi0 for v in values],
    })
    return LimitDiagnostics(table=table, shannon_capacity=capacity,
                            neg_log_pi0=neg_log_pi0, monotone=monotone)


def e0_derivative_at_zero(p: Pmf, w: Dmc, h: float = 1e-6) -> float:
    """E0 在 ρ=0⁺ 处的前向差分斜率，理论值为 I(P,W)"""
    if not h > 0:
        raise ParameterError(f"步长必须为正, 实际 {h}")
    return e0(h, p, w) / h


def uniform_epsilon_noise_e0_bound(xi: float, eps: float, k: int) -> float:
    """
    ε-noise 信道在均匀输入下 E0(ξ) 的闭式下界
    ξ log k - (1+ξ) log(1 + (k-1) ε^{1/(1+ξ)})
    """
    _check_rho(xi)
    return xi * math.log(k) - (1 + xi) * math.log1p((k - 1) * eps ** (1.0 / (1.0 + xi)))
