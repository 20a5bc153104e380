# caplab/bounds/forney.py
"""
Forney 型下界

    Ceo ≥ -Σ_y (PW)(y) log P(X(y))
    Cal ≥ -ρ⁻¹ log Σ_y (PW)(y) P(X(y))^ρ

以及后者的变分形式、对 P 的多起点最大化和 n 字母版本。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from ..config_manager import get_config
from ..errors import ParameterError, SizeCapError
from ..channel.product import product_channel
from ..channel.types import Dmc, Pmf
from ..parallel import run_tasks
from ..simplex import dirichlet_starts, pick_best, project_to_simplex
from .types import BoundKind, BoundValue

logger = logging.getLogger(__name__)

# 二输入信道上 P=(t, 1-t) 的扫描步长
BINARY_SWEEP_STEP = 1e-4
SUBSET_CHUNK = 4096

NLETTER_MODES = ("exhaustive-uniform", "product")


def _check_rho(rho: float) -> None:
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")


def _support_mass(p: np.ndarray, w: Dmc) -> np.ndarray:
    """P(X(y))"""
    return p @ w.positive.astype(float)


def _log_forney_sum(rho: float, p: np.ndarray, w: Dmc) -> float:
    """log Σ_y (PW)(y) P(X(y))^ρ"""
    q = p @ w.matrix
    mass = _support_mass(p, w)
    live = q > 0
    return float(logsumexp(np.log(q[live]) + rho * np.log(mass[live])))


# ========== 单字母界 ==========
def forney_ceo_bound(p: Pmf, w: Dmc) -> float:
    """-Σ_y (PW)(y) log P(X(y))"""
    w.check_input(p)
    q = w.output_distribution(p)
    mass = _support_mass(p.probs, w)
    live = q > 0
    return float(-np.sum(q[live] * np.log(mass[live])))


def forney_cal_rho_bound(rho: float, p: Pmf, w: Dmc) -> float:
    """-ρ⁻¹ log Σ_y (PW)(y) P(X(y))^ρ"""
    _check_rho(rho)
    w.check_input(p)
    return -_log_forney_sum(rho, p.probs, w) / rho


def forney_variational_form(rho: float, p: Pmf, w: Dmc) -> Tuple[float, Pmf]:
    """
    min_Q F(Q) + ρ⁻¹ D(Q||PW)，F(Q) = -Σ_y Q(y) log P(X(y))

    最小点为 Q*(y) ∝ (PW)(y) P(X(y))^ρ，最小值等于 forney_cal_rho_bound。

    Returns:
        (最小值, Q*)
    """
    _check_rho(rho)
    w.check_input(p)
    q = w.output_distribution(p)
    mass = _support_mass(p.probs, w)
    live = q > 0

    log_weights = np.full(q.size, -np.inf)
    log_weights[live] = np.log(q[live]) + rho * np.log(mass[live])
    log_z = float(logsumexp(log_weights[live]))
    q_star = np.zeros(q.size)
    q_star[live] = np.exp(log_weights[live] - log_z)

    f_term = -float(np.sum(q_star[live] * np.log(mass[live])))
    d_term = float(np.sum(q_star[live] * (np.log(q_star[live]) - np.log(q[live]))))
    return f_term + d_term / rho, Pmf(q_star)


# ========== 对 P 最大化 ==========
@dataclass
class _Ascent:
    value: float
    p: np.ndarray
    iterations: int


def _log_sum_gradient(rho: float, p: np.ndarray, w: Dmc) -> Tuple[float, np.ndarray]:
    """g(P) = log Σ_y (PW)(y) P(X(y))^ρ 及其梯度"""
    ind = w.positive.astype(float)
    q = p @ w.matrix
    mass = p @ ind
    live = q > 0
    log_terms = np.full(q.size, -np.inf)
    log_terms[live] = np.log(q[live]) + rho * np.log(mass[live])
    log_s = float(logsumexp(log_terms[live]))

    # (PW)·P(X)^{ρ-1} 写成 (PW/P(X))·P(X)^ρ，在 P(X)=0 处取 0
    mass_pow = np.zeros(q.size)
    mass_pow[live] = np.exp(rho * np.log(mass[live]) - log_s)
    ratio = np.zeros(q.size)
    ratio[live] = q[live] / mass[live]
    grad = w.matrix @ mass_pow + rho * (ind @ (ratio * mass_pow))
    return log_s, grad


def _projected_descent(rho: float, w: Dmc, p0: np.ndarray, tol: float,
                       max_iter: int) -> _Ascent:
    """投影梯度下降最小化 g(P)，只接受使 g 下降的步"""
    p = project_to_simplex(p0)
    g, grad = _log_sum_gradient(rho, p, w)
    step = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        accepted = False
        while step > 1e-16:
            cand = project_to_simplex(p - step * grad)
            cand_g, cand_grad = _log_sum_gradient(rho, cand, w)
            if cand_g < g:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improvement = g - cand_g
        p, g, grad = cand, cand_g, cand_grad
        step *= 2.0
        if improvement <= tol * max(1.0, abs(g)):
            break
    return _Ascent(-g / rho, p, it)


def _binary_sweep(rho: float, w: Dmc) -> Tuple[float, np.ndarray]:
    t = np.linspace(0.0, 1.0, int(round(1.0 / BINARY_SWEEP_STEP)) + 1)
    ps = np.column_stack((t, 1.0 - t))
    q = ps @ w.matrix
    mass = ps @ w.positive.astype(float)
    with np.errstate(divide="ignore"):
        log_mass = np.log(np.where(q > 0, mass, 1.0))
        log_terms = np.where(q > 0, np.log(q) + rho * log_mass, -np.inf)
    values = -logsumexp(log_terms, axis=1) / rho
    i = int(np.argmax(values))
    return float(values[i]), ps[i]


def maximize_forney(rho: float, w: Dmc, restarts: Optional[int] = None,
                    extra_starts: Sequence[Pmf] = (),
                    tol: Optional[float] = None) -> BoundValue:
    """
    对 P 最大化 forney_cal_rho_bound

    目标对 P 一般非凹，采用多起点投影梯度：均匀分布、π0 最优分布、
    extra_starts 以及 Dirichlet(1) 随机起点；二输入信道另做 t 步长 1e-4 的扫描。
    任何 P 处的取值都是 Cal 的合法下界。

    Args:
        rho: ρ > 0
        w: 信道
        restarts: 随机起点个数，默认 solver.forney_restarts
        extra_starts: 附加起点
        tol: 相对改进容限

    Returns:
        BoundValue
    """
    from ..capacity.pi0 import pi0

    _check_rho(rho)
    cfg = get_config().solver
    restarts = cfg.forney_restarts if restarts is None else restarts
    tol = cfg.tol if tol is None else tol
    k = w.input_size

    starts: List[np.ndarray] = [np.full(k, 1.0 / k), np.array(pi0(w).p_star.probs)]
    starts += [np.array(s.probs, dtype=float) for s in extra_starts]
    starts += dirichlet_starts(k, restarts, seed=0)

    runs = run_tasks(lambda s: _projected_descent(rho, w, s, tol, cfg.forney_max_iter),
                     starts)
    candidates = [(r.value, r.p) for r in runs]
    if k == 2:
        candidates.append(_binary_sweep(rho, w))
    value, p = pick_best(candidates)
    iterations = sum(r.iterations for r in runs)
    logger.debug(f"Forney 最大化 ρ={rho}: {value:.9g}, 迭代 {iterations}")
    return BoundValue(name="forney_cal_rho_max", value=float(value),
                      kind=BoundKind.LOWER, p_used=Pmf(p))


# ========== n 字母版本 ==========
def _subset_masks(start: int, stop: int, size: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(size)[None, :]) & 1).astype(float)


def _best_uniform_support(rho: float, wn: Dmc) -> Tuple[float, np.ndarray]:
    """在所有非空支撑上的均匀分布中取 forney_cal_rho_bound 的最大值"""
    size = wn.input_size
    ind = wn.positive.astype(float)
    best_value = -math.inf
    best_mask: Optional[np.ndarray] = None
    total = 1 << size
    for start in range(1, total, SUBSET_CHUNK):
        b = _subset_masks(start, min(start + SUBSET_CHUNK, total), size)
        counts = b.sum(axis=1, keepdims=True)
        q = (b @ wn.matrix) / counts
        mass = (b @ ind) / counts
        with np.errstate(divide="ignore"):
            log_mass = np.log(np.where(q > 0, mass, 1.0))
            log_terms = np.where(q > 0, np.log(q) + rho * log_mass, -np.inf)
        values = -logsumexp(log_terms, axis=1) / rho
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value = float(values[i])
            best_mask = b[i]
    assert best_mask is not None
    return best_value, best_mask / best_mask.sum()


def n_letter_forney(rho: float, w: Dmc, n: int, mode: str = "exhaustive-uniform",
                    p1: Optional[Pmf] = None) -> BoundValue:
    """
    (1/n)·forney_cal_rho_bound 在 W^n 上的取值

    Args:
        rho: ρ > 0
        w: 单字母信道
        n: 分组长度
        mode: exhaustive-uniform 遍历 |X|^n 个输入序列的全部非空支撑（|X|^n ≤ 20）；
              product 使用乘积分布 P₁^n
        p1: product 模式下的单字母分布，默认均匀

    Returns:
        BoundValue: 每符号取值
    """
    _check_rho(rho)
    if n < 1:
        raise ParameterError(f"n 必须 ≥ 1, 实际 {n}")
    if mode not in NLETTER_MODES:
        raise ParameterError(f"未知的模式: {mode}. 可选: {list(NLETTER_MODES)}")

    if mode == "exhaustive-uniform":
        cap = get_config().limits.exhaustive_support_cap
        size = w.input_size ** n
        if size > cap:
            raise SizeCapError(f"|X|^n = {size} 超过穷举上限 {cap}，请使用 product 模式")
        wn = product_channel(w, n)
        value, p = _best_uniform_support(rho, wn)
    else:
        p1 = p1 or Pmf.uniform(w.input_size)
        w.check_input(p1)
        wn = product_channel(w, n)
        p = p1.probs
        for _ in range(n - 1):
            p = np.kron(p, p1.probs)
        value = forney_cal_rho_bound(rho, Pmf(p), wn)

    return BoundValue(name=f"forney_cal_rho_n{n}", value=value / n,
                      kind=BoundKind.LOWER, p_used=Pmf(p))
