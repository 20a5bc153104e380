# caplab/capacity/binary.py
"""二输入信道的列表容量与零未检测错误容量的精确值"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from ..errors import ParameterError
from ..channel.structure import binary_input_reduce, channel_graph, check_factorization
from ..channel.types import Dmc
from ..gallager.e0 import maximize_e0
from .shannon import shannon_capacity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinaryExact:
    cal: float
    ceo: float
    reduced: Dmc


def binary_input_exact(w: Dmc, rho: float, tol: Optional[float] = None) -> BinaryExact:
    """
    二输入信道：合并同支撑输出后信道图无环、可分解，
    于是 Cal = 化简信道的截止率，Ceo = 化简信道的 Shannon 容量

    Args:
        w: 二输入信道
        rho: ρ > 0

    Returns:
        BinaryExact
    """
    if w.input_size != 2:
        raise ParameterError(f"binary_input_exact 需要 2 个输入, 实际 {w.input_size}")
    reduced = binary_input_reduce(w)
    if not channel_graph(reduced).acyclic or check_factorization(reduced) is None:
        raise AssertionError("二输入化简信道应无环且可分解")
    cal = maximize_e0(rho, reduced, tol=tol).require_converged().cutoff_rate
    ceo = shannon_capacity(reduced, tol=tol).require_converged().value
    logger.debug(f"二输入精确值: Cal={cal:.9g}, Ceo={ceo:.9g}")
    return BinaryExact(cal=cal, ceo=ceo, reduced=reduced)
