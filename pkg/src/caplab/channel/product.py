# caplab/channel/product.py
"""n 次扩展信道 W^n"""
from __future__ import annotations

import itertools
import logging
from functools import reduce
from typing import Sequence

import numpy as np

from ..config_manager import get_config
from ..errors import ParameterError, SizeCapError
from .types import Dmc

logger = logging.getLogger(__name__)


def product_size(w: Dmc, n: int) -> int:
    return (w.input_size ** n) * (w.output_size ** n)


def product_channel(w: Dmc, n: int) -> Dmc:
    """
    构造 W^n，输入与输出序列均按字典序排列（首坐标最高位）

    Args:
        w: 单字母信道
        n: 分组长度

    Returns:
        Dmc: |X|^n × |Y|^n 的信道
    """
    if n < 1:
        raise ParameterError(f"分组长度必须为正整数, 实际 {n}")
    if n == 1:
        return w
    cap = get_config().limits.product_cap
    size = product_size(w, n)
    if size > cap:
        raise SizeCapError(f"W^{n} 需要 {size} 个元素, 超过上限 {cap}")

    matrix = reduce(np.kron, [w.matrix] * n)
    in_labels = tuple(",".join(t) for t in itertools.product(w.input_labels, repeat=n))
    out_labels = tuple(",".join(t)
                       for t in itertools.product(w.output_labels, repeat=n))
    logger.debug(f"构造 W^{n}: {matrix.shape}")
    return Dmc(matrix, input_labels=in_labels, output_labels=out_labels)


def sequence_index(symbols: Sequence[int], alphabet_size: int) -> int:
    """序列在字典序中的下标"""
    index = 0
    for s in symbols:
        index = index * alphabet_size + int(s)
    return index


def all_sequences(alphabet_size: int, n: int) -> np.ndarray:
    """全部长度为 n 的序列，按字典序，形状 (alphabet_size^n, n)"""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((alphabet_size,) * n).reshape(n, -1).T
    return grids.astype(np.int64)
