# caplab/capacity/subchannels.py
"""
min_{V≪W} C(V) 的交叉校验

C(V) 对 V 凸；在 Blahut-Arimoto 的最优 P* 处取 Danskin 次梯度
∂I(P*,V)/∂V(y|x) = P*(x) log(V(y|x)/(P*V)(y))，按行做熵镜像下降，
W 的结构零永不更新。-log π0 是该最小值的下界，差值作为证书。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..config_manager import get_config
from ..errors import ConvergenceError
from ..channel.types import AuxChannel, Dmc
from ..parallel import run_tasks
from .pi0 import pi0
from .shannon import blahut_arimoto

logger = logging.getLogger(__name__)

# 熵镜像下降的步长系数，第 k 步为 STEP_SCALE/√k
STEP_SCALE = 2.0
INNER_MAX_ITER = 5_000


@dataclass(frozen=True)
class SubchannelResult:
    value: float
    v_star: AuxChannel
    neg_log_pi0: float
    iterations: int
    converged: bool

    @property
    def gap(self) -> float:
        return self.value - self.neg_log_pi0

    def require_converged(self) -> SubchannelResult:
        if not self.converged:
            raise ConvergenceError(f"min C(V) 未达到 -log π0 证书, 差 {self.gap:.3g}",
                                   result=self, residual=self.gap)
        return self


@dataclass
class _Descent:
    value: float
    v: np.ndarray
    iterations: int


def _random_start(mask: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    v = np.zeros(mask.shape)
    for x in range(mask.shape[0]):
        idx = np.flatnonzero(mask[x])
        v[x, idx] = rng.dirichlet(np.ones(idx.size))
    return v


def _mirror_descent(v0: np.ndarray, mask: np.ndarray, target: float, tol: float,
                    inner_tol: float, max_iter: int) -> _Descent:
    v = v0.copy()
    p: Optional[np.ndarray] = None
    best = _Descent(math.inf, v.copy(), 0)
    for k in range(1, max_iter + 1):
        info, p, gap, _ = blahut_arimoto(v, p0=p, tol=inner_tol,
                                         max_iter=INNER_MAX_ITER)
        upper = info + gap
        if upper < best.value:
            best = _Descent(upper, v.copy(), k)
        if best.value - target <= tol:
            break

        q = p @ v
        with np.errstate(divide="ignore", invalid="ignore"):
            grad = np.where(mask, p[:, None] * (np.log(v) - np.log(q)[None, :]), 0.0)
        step = STEP_SCALE / math.sqrt(k)
        logits = np.where(mask, np.log(np.where(mask, v, 1.0)) - step * grad, -np.inf)
        logits -= logits.max(axis=1, keepdims=True)
        v = np.exp(logits)
        v /= v.sum(axis=1, keepdims=True)
    best.iterations = k
    return best


def min_capacity_subchannels(w: Dmc, tol: float = 1e-4,
                             max_iter: Optional[int] = None,
                             restarts: Optional[int] = None,
                             seed: int = 0) -> SubchannelResult:
    """
    最小化 C(V)，V 取遍 V ≪ W 的行随机矩阵

    Args:
        w: 信道
        tol: 与 -log π0 的允许差
        max_iter: 外层迭代次数，默认 solver.subchannel_outer_iter
        restarts: 起点数（首个起点为 W 本身），默认 solver.subchannel_restarts
        seed: 随机起点种子

    Returns:
        SubchannelResult: value 为 C(V*) 的上估计（I + BA 间隙）
    """
    cfg = get_config().solver
    max_iter = cfg.subchannel_outer_iter if max_iter is None else max_iter
    restarts = cfg.subchannel_restarts if restarts is None else restarts

    target = pi0(w).neg_log_value
    mask = w.positive
    rng = np.random.default_rng(seed)
    starts: List[np.ndarray] = [np.array(w.matrix)]
    starts += [_random_start(mask, rng) for _ in range(max(0, restarts - 1))]

    runs = run_tasks(
        lambda v0: _mirror_descent(v0, mask, target, tol, cfg.subchannel_inner_tol,
                                   max_iter),
        starts)
    best = min(runs, key=lambda r: r.value)
    converged = best.value - target <= tol
    if not converged:
        logger.warning(f"min C(V) = {best.value:.6g} 未达到 -log π0 = {target:.6g} "
                       f"(tol {tol})")
    return SubchannelResult(
        value=best.value,
        v_star=AuxChannel(best.v, w),
        neg_log_pi0=target,
        iterations=sum(r.iterations for r in runs),
        converged=converged,
    )
