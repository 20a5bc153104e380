# caplab/bounds/types.py
"""界的数值表示"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import ParameterError
from ..channel.types import Pmf


class BoundKind(Enum):
    """界的方向"""
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True, eq=False)
class BoundValue:
    """
    一个界的数值（nats）

    Attributes:
        name: 界的名称，同时作为报告中的 tag
        value: 取值，可为 ±inf
        kind: 上界或下界
        p_used: 计算所用的输入分布
        residual: 求解残差（非负）
        dual: 对偶变量
        converged: 求解是否达到容限
    """
    name: str
    value: float
    kind: BoundKind = BoundKind.LOWER
    p_used: Optional[Pmf] = None
    residual: Optional[float] = None
    dual: Optional[np.ndarray] = None
    converged: bool = True

    def __post_init__(self) -> None:
        if self.residual is not None and not self.residual >= 0:
            raise ParameterError(f"{self.name}: 残差必须非负, 实际 {self.residual}")

    @property
    def p_vector(self) -> str:
        if self.p_used is None:
            return ""
        return " ".join(f"{v:.12g}" for v in self.p_used.probs)
