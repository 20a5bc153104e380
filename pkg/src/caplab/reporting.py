# caplab/reporting.py
"""
报告输出

每个数值行带有 tag 以便追溯其来源公式；CSV 由 pandas 生成，
浮点格式取 output.float_format，可选 nats → bits 换算与时间戳首行。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

from .config_manager import get_config
from .channel.types import Pmf

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["name", "kind", "value_nats", "rho", "p_vector",
                  "certificate_residual", "tag"]
SIMULATION_COLUMNS = ["n", "R_eff", "rho", "moment", "se", "E1_freq", "E2_freq",
                      "E3_freq", "seed"]
LN2 = math.log(2.0)


def format_pmf(p: Optional[Pmf]) -> str:
    if p is None:
        return ""
    return " ".join(f"{v:.12g}" for v in p.probs)


def header_line(command: str) -> str:
    stamp = pd.Timestamp.now(tz="UTC").strftime("%Y-%m-%dT%H:%M:%SZ")
    return f"# caplab {command} {stamp}"


def render_frame(frame: pd.DataFrame, fmt: str = "csv", command: str = "",
                 header: Optional[bool] = None, bits: Optional[bool] = None,
                 rate_columns: Iterable[str] = ()) -> str:
    """
    渲染表格

    Args:
        frame: 数据
        fmt: csv 或 text
        command: 写入首行的命令名
        header: 是否输出时间戳首行，默认 output.header
        bits: 是否把 rate_columns 换算为 bits，默认 output.bits
        rate_columns: 以 nats 计的列；换算后列名中的 nats 改为 bits
    """
    cfg = get_config().output
    header = cfg.header if header is None else header
    bits = cfg.bits if bits is None else bits

    frame = frame.copy()
    if bits:
        renames = {}
        for col in rate_columns:
            if col in frame.columns:
                frame[col] = pd.to_numeric(frame[col], errors="coerce") / LN2
                renames[col] = col.replace("nats", "bits")
        frame = frame.rename(columns=renames)

    if fmt == "csv":
        body = frame.to_csv(index=False, float_format=cfg.float_format,
                            lineterminator="\n")
    elif fmt == "text":
        body = frame.to_string(index=False,
                               float_format=lambda v: cfg.float_format % v) + "\n"
    else:
        raise ValueError(f"未知的输出格式: {fmt}. 可选: ['csv', 'text']")
    if header:
        body = header_line(command) + "\n" + body
    return body


@dataclass
class Report:
    """有序的数值报告；converged 为 False 时命令行以退出码 3 结束"""
    command: str
    rows: List[dict] = field(default_factory=list)
    converged: bool = True
    rates: List[bool] = field(default_factory=list)

    def add(self, name: str, value: float, kind: str = "value",
            rho: Optional[float] = None, p: Optional[Pmf] = None,
            residual: Optional[float] = None,
            tag: Optional[str] = None, rate: bool = True) -> Report:
        """rate 为 False 的行（概率、矩、计数）不做 bits 换算"""
        self.rates.append(rate)
        self.rows.append({
            "name": name,
            "kind": kind,
            "value_nats": float(value) if value is not None else np.nan,
            "rho": np.nan if rho is None else float(rho),
            "p_vector": format_pmf(p),
            "certificate_residual": np.nan if residual is None else float(residual),
            "tag": tag or name,
        })
        return self

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=REPORT_COLUMNS)

    def render(self, fmt: str = "csv", header: Optional[bool] = None,
               bits: Optional[bool] = None) -> str:
        frame = self.to_frame()
        bits = get_config().output.bits if bits is None else bits
        if bits:
            rates = np.array(self.rates, dtype=bool)
            frame.loc[rates, "value_nats"] = frame.loc[rates, "value_nats"] / LN2
            frame = frame.rename(columns={"value_nats": "value_bits"})
        return render_frame(frame, fmt=fmt, command=self.command, header=header,
                            bits=False)
