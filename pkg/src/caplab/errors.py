# caplab/errors.py
# -*- coding: utf-8 -*-
"""
异常定义

输入校验类错误同时继承 ValueError，收敛失败同时继承 RuntimeError，
命令行据此映射退出码（2 / 3）。
"""
from __future__ import annotations

from typing import Any, Optional


class CaplabError(Exception):
    """caplab 异常基类"""


class ChannelValidationError(CaplabError, ValueError):
    """信道矩阵或概率向量不合法"""


class ParameterError(CaplabError, ValueError):
    """参数取值不合法（如 ρ ≤ 0、输入数不为 2）"""


class SizeCapError(CaplabError, ValueError):
    """枚举规模超出配置上限"""


class ConvergenceError(CaplabError, RuntimeError):
    """优化器未在迭代上限内满足收敛判据"""

    def __init__(self, message: str, result: Any = None,
                 residual: Optional[float] = None) -> None:
        super().__init__(message)
        self.result = result
        self.residual = residual
