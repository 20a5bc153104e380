# caplab/simplex.py
"""概率单纯形上的投影、起点与确定性合并"""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np

# 视为同值的目标函数差
VALUE_TIE_TOL = 1e-15


def project_to_simplex(c: np.ndarray) -> np.ndarray:
    """欧氏投影：min ||x - c||² s.t. Σx = 1, x ≥ 0"""
    c = np.asarray(c, dtype=float)
    a = -np.sort(-c)
    lambdas = (np.cumsum(a) - 1) / np.arange(1, c.size + 1)
    for k in range(c.size - 1, -1, -1):
        if a[k] > lambdas[k]:
            return np.maximum(c - lambdas[k], 0)
    return np.full(c.size, 1.0 / c.size)


def dirichlet_starts(k: int, count: int, seed: int = 0) -> List[np.ndarray]:
    """count 个 Dirichlet(1) 起点"""
    rng = np.random.default_rng(seed)
    return [rng.dirichlet(np.ones(k)) for _ in range(count)]


def pick_best(candidates: Sequence[Tuple[float, np.ndarray]],
              maximize: bool = True) -> Optional[Tuple[float, np.ndarray]]:
    """
    按 (目标值, 字典序 P) 选择最优候选，结果与候选产生的先后顺序无关
    """
    best: Optional[Tuple[float, np.ndarray]] = None
    for value, p in candidates:
        if not np.isfinite(value) and best is not None:
            continue
        if best is None:
            best = (value, p)
            continue
        gain = value - best[0] if maximize else best[0] - value
        if gain > VALUE_TIE_TOL:
            best = (value, p)
        elif abs(gain) <= VALUE_TIE_TOL and tuple(p) < tuple(best[1]):
            best = (value, p)
    return best
