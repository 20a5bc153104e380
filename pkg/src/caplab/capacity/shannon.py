# caplab/capacity/shannon.py
"""Blahut-Arimoto 计算 Shannon 容量，附对偶间隙证书"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import rel_entr

from ..config_manager import get_config
from ..errors import ConvergenceError
from ..channel.types import Dmc, Pmf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CapacityResult:
    """C 的下界 I(P*,W) 与间隙 max_x D(W(·|x)||P*W) - I(P*,W)"""
    value: float
    p_star: Pmf
    gap: float
    iterations: int
    converged: bool

    @property
    def upper(self) -> float:
        return self.value + self.gap

    def require_converged(self) -> CapacityResult:
        if not self.converged:
            raise ConvergenceError(f"Blahut-Arimoto 未收敛, 间隙 {self.gap:.3g}",
                                   result=self, residual=self.gap)
        return self


def _row_divergences(matrix: np.ndarray, q: np.ndarray) -> np.ndarray:
    """D(x) = D(W(·|x) || q)"""
    return rel_entr(matrix, q[None, :]).sum(axis=1)


def blahut_arimoto(matrix: np.ndarray, p0: Optional[np.ndarray] = None,
                   tol: float = 1e-9, max_iter: int = 200_000
                   ) -> Tuple[float, np.ndarray, float, int]:
    """
    交替最大化 P ← P·exp(D(x)) 归一化

    Args:
        matrix: 行随机矩阵
        p0: 初始分布（会被截到严格正），默认均匀
        tol: 间隙容限

    Returns:
        (I(P,W), P, gap, iterations)
    """
    k = matrix.shape[0]
    if p0 is None:
        p = np.full(k, 1.0 / k)
    else:
        p = np.maximum(np.asarray(p0, dtype=float), 1e-12)
        p /= p.sum()

    info, gap = 0.0, np.inf
    for it in range(max_iter + 1):
        q = p @ matrix
        d = _row_divergences(matrix, q)
        info = float(p @ d)
        gap = float(d.max()) - info
        if gap <= tol or it == max_iter:
            return info, p, max(gap, 0.0), it
        p = p * np.exp(d - d.max())
        p /= p.sum()
    return info, p, max(gap, 0.0), max_iter


def shannon_capacity(w: Dmc, tol: Optional[float] = None,
                     max_iter: Optional[int] = None) -> CapacityResult:
    """
    C = max_P I(P,W)

    Returns:
        CapacityResult: value 为 I(P*,W)，真值位于 [value, value + gap]
    """
    cfg = get_config().solver
    tol = cfg.tol if tol is None else tol
    max_iter = cfg.ba_max_iter if max_iter is None else max_iter
    info, p, gap, iterations = blahut_arimoto(w.matrix, tol=tol, max_iter=max_iter)
    converged = gap <= tol
    if not converged:
        logger.warning(f"Blahut-Arimoto 在 {iterations} 次迭代后间隙为 {gap:.3g}")
    return CapacityResult(value=info, p_star=Pmf(p), gap=gap,
                          iterations=iterations, converged=converged)
