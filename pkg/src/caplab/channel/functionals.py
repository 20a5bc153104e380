# caplab/channel/functionals.py
"""Shannon 信息量（单位 nats），遵循 0·log 约定"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import entr, rel_entr

from ..errors import ChannelValidationError
from .types import Dmc, Pmf

MatrixLike = Union[Dmc, np.ndarray]


@dataclass(frozen=True)
class InfoFunctionals:
    """H(P)、H(V|P)、I(P,V)、D(PV||PW)、D(V||W|P)"""
    entropy: float
    conditional_entropy: float
    mutual_information: float
    output_divergence: float
    conditional_divergence: float


def _as_matrix(v: MatrixLike) -> np.ndarray:
    return v.matrix if isinstance(v, Dmc) else np.asarray(v, dtype=float)


def _probs(p: Union[Pmf, np.ndarray]) -> np.ndarray:
    return p.probs if isinstance(p, Pmf) else np.asarray(p, dtype=float)


def entropy(p: Union[Pmf, np.ndarray]) -> float:
    return float(entr(_probs(p)).sum())


def conditional_entropy(p: Union[Pmf, np.ndarray], v: MatrixLike) -> float:
    """H(V|P) = Σ_x P(x) H(V(·|x))"""
    return float(_probs(p) @ entr(_as_matrix(v)).sum(axis=1))


def divergence(q: Union[Pmf, np.ndarray], q_ref: Union[Pmf, np.ndarray]) -> float:
    """D(Q||Q')，Q(y) > 0 = Q'(y) 时为 +inf"""
    return float(rel_entr(_probs(q), _probs(q_ref)).sum())


def conditional_divergence(p: Union[Pmf, np.ndarray], v: MatrixLike,
                           w: MatrixLike) -> float:
    """D(V||W|P)，P(x) = 0 的行不计入"""
    pv = _probs(p)[:, None]
    return float(rel_entr(pv * _as_matrix(v), pv * _as_matrix(w)).sum())


def mutual_information(p: Union[Pmf, np.ndarray], v: MatrixLike) -> float:
    """I(P,V) = D(P∘V || P×PV)"""
    probs = _probs(p)
    mat = _as_matrix(v)
    joint = probs[:, None] * mat
    q = probs @ mat
    return float(rel_entr(joint, probs[:, None] * q[None, :]).sum())


def info_functionals(p: Pmf, v: MatrixLike, w: MatrixLike) -> InfoFunctionals:
    """
    计算 P、V、W 的全部标准信息量

    Args:
        p: 输入分布
        v: 辅助信道矩阵
        w: 参考信道

    Returns:
        InfoFunctionals: D(V||W|P) 为 +inf 当且仅当某个 P(x)>0 的行有 V(y|x)>0=W(y|x)
    """
    v_mat = _as_matrix(v)
    w_mat = _as_matrix(w)
    if v_mat.shape != w_mat.shape:
        raise ChannelValidationError(f"V 形状 {v_mat.shape} 与 W 形状 {w_mat.shape} 不一致")
    if p.alphabet_size != v_mat.shape[0]:
        raise ChannelValidationError(
            f"输入分布长度 {p.alphabet_size} 与矩阵行数 {v_mat.shape[0]} 不一致")

    return InfoFunctionals(
        entropy=entropy(p),
        conditional_entropy=conditional_entropy(p, v_mat),
        mutual_information=mutual_information(p, v_mat),
        output_divergence=divergence(p.probs @ v_mat, p.probs @ w_mat),
        conditional_divergence=conditional_divergence(p, v_mat, w_mat),
    )
