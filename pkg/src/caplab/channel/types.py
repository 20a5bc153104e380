# caplab/channel/types.py
"""信道、概率向量与信道图的基础类型定义"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ChannelValidationError

# ========== 常量定义 ==========
ROW_SUM_TOL = 1e-9       # 超出则拒绝
STRICT_ROW_TOL = 1e-12   # 以内不做归一化

# 取值可为 math.inf / -math.inf 的实数
ExtendedReal = float

ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


def _frozen_array(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def normalize_rows(matrix: ArrayLike, tol: float = ROW_SUM_TOL) -> np.ndarray:
    """
    校验并归一化行随机矩阵

    零元素保持精确为 0；行和偏离 1 超过 tol 时报错。

    Args:
        matrix: 二维数组
        tol: 行和容差

    Returns:
        np.ndarray: 行和为 1 的副本
    """
    try:
        arr = np.array(matrix, dtype=float)
    except (TypeError, ValueError) as e:
        raise ChannelValidationError(f"矩阵无法解析为数值数组（可能行长度不一致）: {e}") from e
    if arr.ndim != 2:
        raise ChannelValidationError(f"信道矩阵必须是二维的, 实际维度 {arr.ndim}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ChannelValidationError("输入或输出字母表为空")
    if not np.all(np.isfinite(arr)):
        raise ChannelValidationError("矩阵含有非有限值")
    bad = np.argwhere(arr < 0)
    if bad.size:
        x, y = bad[0]
        raise ChannelValidationError(
            f"negative entry {arr[x, y]} at row {x}, column {y}")
    if np.any(arr > 1 + ROW_SUM_TOL):
        raise ChannelValidationError("矩阵元素超过 1")

    sums = arr.sum(axis=1)
    for x, s in enumerate(sums):
        if abs(s - 1.0) > tol:
            raise ChannelValidationError(f"row sum {s:.12g} (row {x}) deviates from 1")
    off = np.abs(sums - 1.0) > STRICT_ROW_TOL
    if np.any(off):
        arr[off] = arr[off] / sums[off, None]
    return arr


@dataclass(frozen=True, eq=False)
class Pmf:
    """有限字母表上的概率向量"""
    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float).reshape(-1)
        if arr.size == 0:
            raise ChannelValidationError("概率向量为空")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ChannelValidationError(f"概率向量含负值或非有限值: {arr}")
        total = arr.sum()
        if abs(total - 1.0) > ROW_SUM_TOL:
            raise ChannelValidationError(f"概率向量和为 {total:.12g}, 应为 1")
        if abs(total - 1.0) > STRICT_ROW_TOL:
            arr = arr / total
        object.__setattr__(self, "probs", _frozen_array(arr))

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    @cached_property
    def support(self) -> FrozenSet[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.probs > 0))

    @classmethod
    def uniform(cls, k: int) -> Pmf:
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point(cls, k: int, index: int) -> Pmf:
        arr = np.zeros(k)
        arr[index] = 1.0
        return cls(arr)

    @classmethod
    def uniform_on(cls, k: int, support: Sequence[int]) -> Pmf:
        """支撑集上的均匀分布"""
        arr = np.zeros(k)
        arr[list(support)] = 1.0 / len(support)
        return cls(arr)

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.probs)

    def __len__(self) -> int:
        return self.alphabet_size

    def __repr__(self) -> str:
        body = ", ".join(f"{v:.6g}" for v in self.probs)
        return f"Pmf([{body}])"


@dataclass(frozen=True, eq=False)
class Dmc:
    """离散无记忆信道 W(y|x)，行对应输入、列对应输出"""
    matrix: np.ndarray
    input_labels: Tuple[str, ...] = ()
    output_labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = normalize_rows(self.matrix)
        object.__setattr__(self, "matrix", _frozen_array(arr))

        n_in, n_out = arr.shape
        in_labels = (tuple(str(v) for v in self.input_labels)
                     or tuple(str(i) for i in range(n_in)))
        out_labels = (tuple(str(v) for v in self.output_labels)
                      or tuple(str(j) for j in range(n_out)))
        if len(in_labels) != n_in:
            raise ChannelValidationError(f"输入标签数 {len(in_labels)} 与矩阵行数 {n_in} 不符")
        if len(out_labels) != n_out:
            raise ChannelValidationError(f"输出标签数 {len(out_labels)} 与矩阵列数 {n_out} 不符")
        object.__setattr__(self, "input_labels", in_labels)
        object.__setattr__(self, "output_labels", out_labels)

    @property
    def input_size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def output_size(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.input_size, self.output_size

    @cached_property
    def positive(self) -> np.ndarray:
        """结构性非零模式 W(y|x) > 0"""
        mask = self.matrix > 0
        mask.setflags(write=False)
        return mask

    @cached_property
    def support_sets(self) -> Tuple[FrozenSet[int], ...]:
        """X(y) = {x : W(y|x) > 0}"""
        return tuple(frozenset(int(x) for x in np.flatnonzero(self.positive[:, y]))
                     for y in range(self.output_size))

    @cached_property
    def log_matrix(self) -> np.ndarray:
        """log W，零元素为 -inf"""
        with np.errstate(divide="ignore"):
            arr = np.log(self.matrix)
        arr.setflags(write=False)
        return arr

    def output_distribution(self, p: Pmf) -> np.ndarray:
        """PW(y)"""
        self.check_input(p)
        return p.probs @ self.matrix

    def check_input(self, p: Pmf) -> None:
        if p.alphabet_size != self.input_size:
            raise ChannelValidationError(
                f"输入分布长度 {p.alphabet_size} 与信道输入数 {self.input_size} 不符")

    def __repr__(self) -> str:
        return f"Dmc({self.input_size}x{self.output_size})"


@dataclass(frozen=True, eq=False)
class ChannelGraph:
    """信道二部图：边 (x, y) 当且仅当 W(y|x) > 0"""
    adjacency: np.ndarray
    acyclic: bool


@dataclass(frozen=True)
class SupportStructure:
    """supports_and_graph 的结果"""
    support_sets: Tuple[FrozenSet[int], ...]
    graph: ChannelGraph
    epsilon_noise: Optional[float] = None


@dataclass(frozen=True, eq=False)
class Factorization:
    """W(y|x) = A(x)B(y) 在所有正元素上成立"""
    a: np.ndarray
    b: np.ndarray
    components: int = field(default=1)


def log_ratio_term(a: ArrayLike, b: ArrayLike, c: ArrayLike) -> np.ndarray:
    """
    逐元素计算 a·log(b/c)，约定：
    a=0 → 0；a>0,b>0,c=0 → +inf；a>0,b=0,c>0 → -inf
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    a, b, c = np.broadcast_arrays(a, b, c)
    out = np.zeros(a.shape)
    live = a > 0
    both = live & (b > 0) & (c > 0)
    out[both] = a[both] * (np.log(b[both]) - np.log(c[both]))
    out[live & (b > 0) & (c == 0)] = math.inf
    out[live & (b == 0) & (c > 0)] = -math.inf
    # a>0, b=0, c=0 不会在信息量计算中出现，按 0·log(0/0)=0 处理
    return out


@dataclass(frozen=True, eq=False)
class AuxChannel:
    """相对参考信道 W 的辅助信道 V"""
    matrix: np.ndarray
    reference: Dmc

    def __post_init__(self) -> None:
        arr = normalize_rows(self.matrix)
        if arr.shape != self.reference.shape:
            raise ChannelValidationError(
                f"辅助信道形状 {arr.shape} 与参考信道 {self.reference.shape} 不一致")
        object.__setattr__(self, "matrix", _frozen_array(arr))

    @property
    def dominated(self) -> bool:
        """V ≪ W：W(y|x) = 0 处 V(y|x) = 0"""
        return not bool(np.any((self.matrix > 0) & ~self.reference.positive))

    def as_dmc(self) -> Dmc:
        return Dmc(self.matrix, input_labels=self.reference.input_labels,
                   output_labels=self.reference.output_labels)
