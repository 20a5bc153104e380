# caplab/bounds/constant_composition.py
"""
常组分下界

    Ceo ≥ min_{V≪W, PV=PW} I(P,V)
    Cal ≥ min_{V,V'≪W, PV=PV'} I(P,V) + ρ⁻¹ D(V'||W|P)

固定输出边缘 Q 后，min_{PV=Q} I(P,V) = H(P) + H(Q) - max H(M)，
M 取遍支撑在 W 的正元素上、边缘为 (P, Q) 的联合分布，
最大熵 M = diag(a)·1[W>0]·diag(b) 由 Sinkhorn 迭代求得。
Cal 界再对 V' 做熵镜像下降，目标 h(V') = f(PV') + ρ⁻¹ D(V'||W|P) 为凸函数，
Frank-Wolfe 间隙作为收敛证书。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import entr, rel_entr

from ..config_manager import get_config
from ..errors import ParameterError
from ..channel.types import AuxChannel, Dmc, Pmf
from .types import BoundKind, BoundValue

logger = logging.getLogger(__name__)

SINKHORN_TOL = 1e-13
SINKHORN_MAX_ITER = 20_000


@dataclass(frozen=True)
class Coupling:
    """最大熵联合分布及 Sinkhorn 缩放"""
    joint: np.ndarray
    a: np.ndarray
    b: np.ndarray
    residual: float


def max_entropy_coupling(p: np.ndarray, q: np.ndarray, mask: np.ndarray,
                         b0: Optional[np.ndarray] = None) -> Coupling:
    """
    支撑在 mask 上、边缘为 (p, q) 的最大熵联合分布

    Args:
        p: 行边缘
        q: 列边缘
        mask: 允许为正的位置
        b0: 列缩放的初值

    Returns:
        Coupling: residual 为边缘误差的最大绝对值
    """
    kernel = (mask & (p[:, None] > 0) & (q[None, :] > 0)).astype(float)
    b = np.where(q > 0, 1.0, 0.0) if b0 is None else np.where(q > 0, b0, 0.0)
    a = np.zeros_like(p)
    residual = math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(SINKHORN_MAX_ITER):
            kb = kernel @ b
            a = np.where(p > 0, p / kb, 0.0)
            ka = kernel.T @ a
            b = np.where(q > 0, q / ka, 0.0)
            joint = a[:, None] * kernel * b[None, :]
            residual = float(np.max(np.abs(joint.sum(axis=1) - p)))
            if residual <= SINKHORN_TOL:
                break
    joint = a[:, None] * kernel * b[None, :]
    return Coupling(joint=joint, a=a, b=b, residual=residual)


def _entropy(values: np.ndarray) -> float:
    return float(entr(values).sum())


def _min_info_given_output(p: np.ndarray, q: np.ndarray, mask: np.ndarray,
                           b0: Optional[np.ndarray] = None) -> Tuple[float, Coupling]:
    """min_{V≪W, PV=q} I(P,V)"""
    coupling = max_entropy_coupling(p, q, mask, b0)
    value = _entropy(p) + _entropy(q) - _entropy(coupling.joint)
    return max(0.0, value), coupling


def _coupling_channel(coupling: Coupling, p: np.ndarray, w: Dmc) -> AuxChannel:
    """M(x,y)/P(x)，P(x)=0 的行沿用 W"""
    v = np.array(w.matrix, dtype=float)
    live = p > 0
    v[live] = coupling.joint[live] / p[live, None]
    return AuxChannel(v, w)


def const_comp_ceo_bound(p: Pmf, w: Dmc) -> BoundValue:
    """min_{V≪W, PV=PW} I(P,V)"""
    w.check_input(p)
    probs = np.asarray(p.probs, dtype=float)
    q = w.output_distribution(p)
    value, coupling = _min_info_given_output(probs, q, w.positive)
    with np.errstate(divide="ignore"):
        dual = np.log(coupling.b)
    return BoundValue(name="const_comp_ceo", value=value, kind=BoundKind.LOWER,
                      p_used=p, residual=coupling.residual, dual=dual,
                      converged=coupling.residual <= 1e-9)


# ========== Cal 界 ==========
@dataclass(frozen=True)
class CalSolution:
    value: float
    v: AuxChannel
    v_prime: AuxChannel
    fw_gap: float
    iterations: int
    converged: bool


def _cal_objective(rho: float, p: np.ndarray, w: Dmc, v_prime: np.ndarray,
                   b0: Optional[np.ndarray]) -> Tuple[float, Coupling, np.ndarray]:
    q = p @ v_prime
    info, coupling = _min_info_given_output(p, q, w.positive, b0)
    div = float(np.sum(p[:, None] * rel_entr(v_prime, w.matrix)))
    return info + div / rho, coupling, q


def _row_gradient(rho: float, w: Dmc, v_prime: np.ndarray, coupling: Coupling,
                  q: np.ndarray) -> np.ndarray:
    """h 对 V'(y|x) 的梯度除以 P(x)，行内常数已略去"""
    mask = w.positive
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.log(coupling.b / q)[None, :] + (np.log(v_prime) - w.log_matrix) / rho
    return np.where(mask, g, 0.0)


def solve_const_comp_cal(rho: float, p: Pmf, w: Dmc, tol: Optional[float] = None,
                         max_iter: Optional[int] = None) -> CalSolution:
    """
    以 V' = W 为起点的熵镜像下降，步长回溯

    Args:
        rho: ρ > 0
        p: 输入分布
        w: 信道
        tol: Frank-Wolfe 间隙容限，默认 solver.tol
        max_iter: 迭代上限，默认 solver.const_comp_max_iter

    Returns:
        CalSolution: value 为当前 V' 处的目标值（最小值的上估计），
        value - fw_gap 为最小值的下估计
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    w.check_input(p)
    cfg = get_config().solver
    tol = cfg.tol if tol is None else tol
    max_iter = cfg.const_comp_max_iter if max_iter is None else max_iter

    probs = np.asarray(p.probs, dtype=float)
    live = probs > 0
    mask = w.positive
    v_prime = np.array(w.matrix, dtype=float)
    value, coupling, q = _cal_objective(rho, probs, w, v_prime, None)

    step = min(1.0, rho)
    fw_gap = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        g = _row_gradient(rho, w, v_prime, coupling, q)
        row_min = np.where(mask, g, np.inf).min(axis=1)
        row_gaps = (v_prime * g).sum(axis=1) - row_min
        fw_gap = float(np.sum(probs[live] * row_gaps[live]))
        if fw_gap <= tol:
            break

        accepted = False
        while step > 1e-14:
            log_v = np.log(np.where(mask, v_prime, 1.0))
            logits = np.where(mask, log_v - step * g, -np.inf)
            logits -= logits.max(axis=1, keepdims=True)
            cand = np.exp(logits)
            cand /= cand.sum(axis=1, keepdims=True)
            cand[~live] = w.matrix[~live]
            cand_value, cand_coupling, cand_q = _cal_objective(rho, probs, w, cand,
                                                               coupling.b)
            if cand_value <= value:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        v_prime, value, coupling, q = cand, cand_value, cand_coupling, cand_q
        step = min(step * 1.5, 1e3)

    converged = fw_gap <= tol
    if not converged:
        logger.debug(f"常组分 Cal 界未达容限: 间隙 {fw_gap:.3g} (ρ={rho})")
    return CalSolution(
        value=float(value),
        v=_coupling_channel(coupling, probs, w),
        v_prime=AuxChannel(v_prime, w),
        fw_gap=max(0.0, fw_gap),
        iterations=it,
        converged=converged,
    )


def const_comp_bounds(rho: float, p: Pmf, w: Dmc,
                      tol: Optional[float] = None) -> Tuple[BoundValue, BoundValue]:
    """
    常组分 Ceo 与 Cal 下界

    Returns:
        (ceo_bound, cal_bound)
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    ceo = const_comp_ceo_bound(p, w)
    sol = solve_const_comp_cal(rho, p, w, tol=tol)
    cal = BoundValue(name="const_comp_cal", value=sol.value, kind=BoundKind.LOWER,
                     p_used=p, residual=sol.fw_gap, converged=sol.converged)
    return ceo, cal
