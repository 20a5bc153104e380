# caplab/listsim/codes.py
"""
码本与反馈策略

两者都提供 symbol_inputs(i, ys)：给定输出序列，第 i 个时刻所有消息的输入符号；
码本的输入与输出前缀无关，反馈策略按前缀查表。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config_manager import get_config
from ..errors import ParameterError, SizeCapError
from ..channel.product import all_sequences
from ..channel.structure import disjoint_support_pairs
from ..channel.types import Dmc

logger = logging.getLogger(__name__)

# 对数似然比较的容限（乘以 n）
TIE_TOL = 1e-12


def prefix_indices(ys: np.ndarray, depth: int, output_size: int) -> np.ndarray:
    """ys[:, :depth] 的字典序下标"""
    index = np.zeros(ys.shape[0], dtype=np.int64)
    for j in range(depth):
        index = index * output_size + ys[:, j]
    return index


@dataclass(frozen=True, eq=False)
class Codebook:
    """
    分组码：M 个长度为 n 的码字（可以重复）

    Attributes:
        codewords: (M, n) 输入符号下标
        input_size: 输入字母表大小
    """
    codewords: np.ndarray
    input_size: int

    def __post_init__(self) -> None:
        arr = np.array(self.codewords, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ParameterError(f"码本至少需要 1 个码字, 形状 {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.input_size):
            raise ParameterError(f"码字符号超出输入字母表 [0, {self.input_size})")
        arr.setflags(write=False)
        object.__setattr__(self, "codewords", arr)

    @property
    def n(self) -> int:
        return int(self.codewords.shape[1])

    @property
    def messages(self) -> int:
        return int(self.codewords.shape[0])

    @property
    def rate(self) -> float:
        return math.log(self.messages) / self.n

    def symbol_inputs(self, i: int, ys: np.ndarray) -> np.ndarray:
        """(M, B) 输入符号"""
        return np.broadcast_to(self.codewords[:, i][:, None],
                               (self.messages, ys.shape[0]))

    def encode(self, i: int, messages: np.ndarray, prefixes: np.ndarray) -> np.ndarray:
        return self.codewords[messages, i]

    def check_channel(self, w: Dmc) -> None:
        if self.input_size > w.input_size:
            raise ParameterError(
                f"码本输入字母表 {self.input_size} 大于信道输入数 {w.input_size}")

    @classmethod
    def random_iid(cls, messages: int, n: int, p: np.ndarray,
                   rng: np.random.Generator) -> Codebook:
        """各分量按 P 独立抽取"""
        p = np.asarray(p, dtype=float)
        return cls(rng.choice(p.size, size=(messages, n), p=p), p.size)

    @classmethod
    def random_constant_composition(cls, messages: int, base: np.ndarray,
                                    input_size: int,
                                    rng: np.random.Generator) -> Codebook:
        """从型类中均匀抽取码字：对基准序列做随机置换"""
        rows = [rng.permutation(base) for _ in range(messages)]
        codewords = np.array(rows, dtype=np.int64).reshape(messages, len(base))
        return cls(codewords, input_size)


@dataclass(frozen=True, eq=False)
class FeedbackStrategy:
    """
    反馈编码器 f^(i)(m, y^{i-1})，按深度存储查表

    Attributes:
        tables: tables[i] 形状 (M, |Y|^i)，列为输出前缀的字典序下标
        input_size: 输入字母表大小
        output_size: 输出字母表大小
    """
    tables: Tuple[np.ndarray, ...]
    input_size: int
    output_size: int

    def __post_init__(self) -> None:
        if not self.tables:
            raise ParameterError("反馈策略至少需要 1 个时刻")
        limits = get_config().limits
        if len(self.tables) > limits.strategy_max_depth:
            raise SizeCapError(
                f"反馈策略深度 {len(self.tables)} 超过上限 {limits.strategy_max_depth}")
        messages = None
        frozen = []
        for i, table in enumerate(self.tables):
            arr = np.array(table, dtype=np.int64)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1)
            expected = self.output_size ** i
            if messages is None:
                messages = arr.shape[0]
            if arr.shape != (messages, expected):
                raise ParameterError(
                    f"深度 {i} 的表形状应为 ({messages}, {expected}), 实际 {arr.shape}")
            if arr.min() < 0 or arr.max() >= self.input_size:
                raise ParameterError(f"深度 {i} 的输入符号超出 [0, {self.input_size})")
            arr.setflags(write=False)
            frozen.append(arr)
        if messages is None or messages < 1:
            raise ParameterError("反馈策略至少需要 1 个消息")
        object.__setattr__(self, "tables", tuple(frozen))

    @property
    def n(self) -> int:
        return len(self.tables)

    @property
    def messages(self) -> int:
        return int(self.tables[0].shape[0])

    @property
    def rate(self) -> float:
        return math.log(self.messages) / self.n

    def symbol_inputs(self, i: int, ys: np.ndarray) -> np.ndarray:
        return self.tables[i][:, prefix_indices(ys, i, self.output_size)]

    def encode(self, i: int, messages: np.ndarray, prefixes: np.ndarray) -> np.ndarray:
        return self.tables[i][messages, prefixes]

    def check_channel(self, w: Dmc) -> None:
        if self.input_size > w.input_size or self.output_size != w.output_size:
            raise ParameterError(
                f"反馈策略字母表 ({self.input_size}, {self.output_size}) 与信道 {w.shape} 不匹配")

    @classmethod
    def from_codebook(cls, code: Codebook, output_size: int) -> FeedbackStrategy:
        """忽略反馈的策略"""
        tables = [np.repeat(code.codewords[:, i][:, None], output_size ** i, axis=1)
                  for i in range(code.n)]
        return cls(tuple(tables), code.input_size, output_size)

    @classmethod
    def from_function(cls, messages: int, n: int, input_size: int, output_size: int,
                      fn: Callable[[int, Tuple[int, ...]], int]) -> FeedbackStrategy:
        """由 fn(m, 输出前缀) 逐项构造"""
        tables = []
        for i in range(n):
            prefixes = all_sequences(output_size, i)
            keys = [tuple(int(s) for s in pre) for pre in prefixes]
            tables.append(np.array([[fn(m, key) for key in keys]
                                    for m in range(messages)], dtype=np.int64))
        return cls(tuple(tables), input_size, output_size)

    @classmethod
    def random(cls, messages: int, n: int, input_size: int, output_size: int,
               seed: int = 0) -> FeedbackStrategy:
        rng = np.random.default_rng(seed)
        tables = [rng.integers(input_size, size=(messages, output_size ** i))
                  for i in range(n)]
        return cls(tuple(tables), input_size, output_size)


Code = Union[Codebook, FeedbackStrategy]


# ========== 似然与列表 ==========
def log_likelihoods(code: Code, w: Dmc, ys: np.ndarray) -> np.ndarray:
    """
    log W^n(y|m)（反馈策略按逐前缀乘积律），形状 (M, B)；结构零为 -inf
    """
    ys = np.atleast_2d(np.asarray(ys, dtype=np.int64))
    if ys.shape[1] != code.n:
        raise ParameterError(f"输出序列长度 {ys.shape[1]} 与分组长度 {code.n} 不符")
    if ys.min() < 0 or ys.max() >= w.output_size:
        raise ParameterError(f"输出符号超出 [0, {w.output_size})")
    log_w = w.log_matrix
    total = np.zeros((code.messages, ys.shape[0]))
    for i in range(code.n):
        total = total + log_w[code.symbol_inputs(i, ys), ys[None, :, i]]
    return total


def list_sets(code: Code, w: Dmc, y: Sequence[int],
              m: int) -> Tuple[List[int], List[int]]:
    """
    L(y) 与 L(m,y)

    L(y) 为似然为正的消息；L(m,y) 为似然不低于消息 m 的消息（并列全部保留）。

    Returns:
        (L(y), L(m,y))，消息按升序
    """
    code.check_channel(w)
    if not 0 <= m < code.messages:
        raise ParameterError(f"消息下标 {m} 超出 [0, {code.messages})")
    ll = log_likelihoods(code, w, np.asarray(y)[None, :])[:, 0]
    consistent = np.flatnonzero(np.isfinite(ll))
    at_least = np.flatnonzero(ll >= ll[m] - TIE_TOL * code.n)
    return [int(v) for v in consistent], [int(v) for v in at_least]


def zero_error_pair_code(w: Dmc, k: int) -> Optional[Codebook]:
    """
    由第一对（字典序）输出支撑不相交的输入 (x, x') 构成的 2^k 个消息、长度 k 的零误差码

    比特 0 映射为 x，比特 1 映射为 x'；不存在这样的输入对时返回 None。
    """
    if k < 1:
        raise ParameterError(f"k 必须 ≥ 1, 实际 {k}")
    pairs = disjoint_support_pairs(w)
    if not pairs:
        return None
    x, x2 = pairs[0]
    bits = all_sequences(2, k)
    return Codebook(np.where(bits == 0, x, x2), w.input_size)


# ========== 文本格式 ==========
def _content_lines(text: str) -> Iterator[List[str]]:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line.split()


def _header_value(tokens: List[str], key: str) -> int:
    if len(tokens) != 2 or tokens[0] != key:
        raise ParameterError(f"缺少字段 {key!r}: {' '.join(tokens)}")
    try:
        return int(tokens[1])
    except ValueError as e:
        raise ParameterError(f"字段 {key!r} 不是整数: {tokens[1]}") from e


def _int_row(tokens: List[str]) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as e:
        raise ParameterError(f"无法解析符号行: {' '.join(tokens)}") from e


def load_codebook(text: str) -> Codebook:
    """
    码本文本格式::

        n 3
        inputs 2
        0 1 0
        1 1 0
    """
    lines = list(_content_lines(text))
    if len(lines) < 3:
        raise ParameterError("码本文件需要 n、inputs 两行及至少一个码字")
    n = _header_value(lines[0], "n")
    inputs = _header_value(lines[1], "inputs")
    rows = [_int_row(tokens) for tokens in lines[2:]]
    if any(len(r) != n for r in rows):
        raise ParameterError(f"码字长度与 n = {n} 不一致")
    return Codebook(np.array(rows, dtype=np.int64), inputs)


def dump_codebook(code: Codebook) -> str:
    lines = [f"n {code.n}", f"inputs {code.input_size}"]
    lines += [" ".join(str(int(s)) for s in row) for row in code.codewords]
    return "\n".join(lines) + "\n"


def load_strategy(text: str) -> FeedbackStrategy:
    """
    反馈策略文本格式（每个 depth 段有 M 行，第 i 段每行 |Y|^i 个符号）::

        n 2
        inputs 2
        outputs 2
        messages 2
        depth 0
        0
        1
        depth 1
        0 1
        1 0
    """
    lines = list(_content_lines(text))
    if len(lines) < 4:
        raise ParameterError("反馈策略文件头不完整")
    n = _header_value(lines[0], "n")
    inputs = _header_value(lines[1], "inputs")
    outputs = _header_value(lines[2], "outputs")
    messages = _header_value(lines[3], "messages")
    body = lines[4:]
    tables = []
    for i in range(n):
        start = i * (messages + 1)
        if start >= len(body) or _header_value(body[start], "depth") != i:
            raise ParameterError(f"缺少 depth {i} 段")
        rows = body[start + 1:start + 1 + messages]
        tables.append(np.array([_int_row(t) for t in rows], dtype=np.int64))
    return FeedbackStrategy(tuple(tables), inputs, outputs)


def load_code_file(path: Union[str, Path]) -> Code:
    """按文件头自动识别码本或反馈策略"""
    text = Path(path).read_text(encoding="utf-8")
    lines = list(_content_lines(text))
    if len(lines) > 2 and lines[2] and lines[2][0] == "outputs":
        return load_strategy(text)
    return load_codebook(text)
