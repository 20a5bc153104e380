# caplab/channel/typeclass.py
"""
型（type）与条件型工具

全部以整数计数存储：型为长度 |X| 的组分，条件型为 |X|×|Y| 的联合计数矩阵，
条件概率 V(y|x) 仅在 x 的计数为正时有定义。
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np

from ..config_manager import get_config
from ..errors import ParameterError, SizeCapError
from .types import Pmf


def multinomial(counts: Sequence[int]) -> int:
    """n! / Π c_i!（精确整数）"""
    total = 0
    result = 1
    for c in counts:
        total += int(c)
        result *= math.comb(total, int(c))
    return result


def composition_count(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1)


@dataclass(frozen=True)
class TypeClass:
    """长度 n 序列在 |X| 个符号上的型"""
    counts: Tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if not counts or any(c < 0 for c in counts):
            raise ParameterError(f"型的计数必须为非负整数: {self.counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def alphabet_size(self) -> int:
        return len(self.counts)

    def pmf(self) -> Pmf:
        return Pmf(np.array(self.counts, dtype=float) / self.n)

    def shell_size(self) -> int:
        """|T_P|"""
        return multinomial(self.counts)

    def base_sequence(self) -> np.ndarray:
        """字典序最小的该型序列"""
        return np.repeat(np.arange(self.alphabet_size), self.counts)


@dataclass(frozen=True)
class ConditionalType:
    """y 关于 x 的条件型，joint[a][b] = #{i : x_i = a, y_i = b}"""
    joint: Tuple[Tuple[int, ...], ...]

    @cached_property
    def counts(self) -> np.ndarray:
        return np.array(self.joint, dtype=np.int64)

    @property
    def row_counts(self) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.counts.sum(axis=1))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def conditional_probs(self) -> np.ndarray:
        """V(y|x)；计数为 0 的输入行为 nan"""
        counts = self.counts.astype(float)
        rows = counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(rows > 0, counts / rows, np.nan)

    def shell_size(self) -> int:
        """|T_V(x)| = Π_x 多项式系数"""
        size = 1
        for row in self.joint:
            size *= multinomial(row)
        return size


# ========== 枚举 ==========
def _compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def enumerate_types(n: int, k: int) -> List[TypeClass]:
    """全部长度 n、字母表大小 k 的型"""
    if n < 0 or k < 1:
        raise ParameterError(f"非法参数 n={n}, k={k}")
    count = composition_count(n, k)
    cap = get_config().limits.type_enumeration_cap
    if count > cap:
        raise SizeCapError(f"型的数量 {count} 超过上限 {cap}")
    return [TypeClass(c) for c in _compositions(n, k)]


def enumerate_conditional_types(p: TypeClass,
                                output_size: int) -> List[ConditionalType]:
    """给定输入型 P_n，全部可能的条件型（每行是该行计数在 |Y| 个输出上的组分）"""
    total = 1
    for c in p.counts:
        total *= composition_count(c, output_size)
    cap = get_config().limits.type_enumeration_cap
    if total > cap:
        raise SizeCapError(f"条件型数量 {total} 超过上限 {cap}")

    rows_per_input = [list(_compositions(c, output_size)) for c in p.counts]
    result: List[ConditionalType] = []

    def build(prefix: List[Tuple[int, ...]], depth: int) -> None:
        if depth == len(rows_per_input):
            result.append(ConditionalType(tuple(prefix)))
            return
        for row in rows_per_input[depth]:
            build(prefix + [row], depth + 1)

    build([], 0)
    return result


# ========== 序列的型 ==========
def type_of(x: Sequence[int], k: int) -> TypeClass:
    counts = np.bincount(np.asarray(x, dtype=np.int64), minlength=k)
    if counts.size > k:
        raise ParameterError(f"序列含有超出字母表 {k} 的符号")
    return TypeClass(tuple(int(c) for c in counts))


def conditional_type(x: Sequence[int], y: Sequence[int],
                     input_size: int, output_size: int) -> ConditionalType:
    """y 关于 x 的条件型（联合计数）"""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ParameterError(f"序列长度不一致: {x.shape} vs {y.shape}")
    flat = np.bincount(x * output_size + y, minlength=input_size * output_size)
    joint = flat.reshape(input_size, output_size)
    return ConditionalType(tuple(tuple(int(v) for v in row) for row in joint))


def in_shell(y: Sequence[int], v: ConditionalType, x: Sequence[int]) -> bool:
    """y ∈ T_V(x)"""
    k_in, k_out = v.counts.shape
    return conditional_type(x, y, k_in, k_out) == v


def message_set(codewords: np.ndarray, y: Sequence[int],
                v: ConditionalType) -> List[int]:
    """M(y,V)：码字与 y 的条件型等于 V 的消息集合（升序）"""
    k_in, k_out = v.counts.shape
    y = np.asarray(y, dtype=np.int64)
    codewords = np.asarray(codewords, dtype=np.int64)
    flat = codewords * k_out + y[None, :]
    target = v.counts.reshape(-1)
    members = []
    for m, row in enumerate(flat):
        if np.array_equal(np.bincount(row, minlength=k_in * k_out), target):
            members.append(m)
    return members


def closest_type(p: Union[Pmf, Sequence[float]], n: int) -> TypeClass:
    """
    全变差距离下最接近 P 的型，同距离取计数向量字典序最小者
    """
    probs = p.probs if isinstance(p, Pmf) else np.asarray(p, dtype=float)
    best = None
    best_key = None
    for t in enumerate_types(n, probs.size):
        dist = float(np.abs(np.array(t.counts) - n * probs).sum())
        key = (round(dist, 9), t.counts)
        if best_key is None or key < best_key:
            best, best_key = t, key
    return best
