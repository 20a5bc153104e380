# caplab/channel/io.py
"""
信道文件读写

文件格式（JSON）:
    {"inputs": ["0", "1"], "outputs": ["0", "e", "1"],
     "matrix": [[0.5, 0.5, 0], [0, 0.5, 0.5]]}
结构零必须写作 0。
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from ..errors import ChannelValidationError
from .types import Dmc

logger = logging.getLogger(__name__)

# 低于该值的正元素多半是本应写成 0 的数值噪声
TINY_ENTRY_WARN = 1e-15


def load_channel(text: str) -> Dmc:
    """
    从 JSON 文本解析信道

    Args:
        text: 信道文件内容

    Returns:
        Dmc: 校验后的信道（行和在 1e-9 以内时归一化）
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChannelValidationError(f"信道文件不是合法 JSON: {e}") from e
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ChannelValidationError("信道文件缺少 matrix 字段")
    return channel_from_dict(doc)


def channel_from_dict(doc: Dict[str, Any]) -> Dmc:
    rows = doc["matrix"]
    if not isinstance(rows, list) or not rows:
        raise ChannelValidationError("empty input alphabet")
    widths = {len(r) if isinstance(r, list) else -1 for r in rows}
    if len(widths) != 1 or -1 in widths:
        raise ChannelValidationError(f"ragged matrix: row lengths {sorted(widths)}")
    if widths == {0}:
        raise ChannelValidationError("empty output alphabet")

    matrix = np.array(rows, dtype=float)
    tiny = (matrix > 0) & (matrix < TINY_ENTRY_WARN)
    if np.any(tiny):
        logger.warning(f"信道矩阵含 {int(tiny.sum())} 个极小正元素，按非零处理；结构零请写作 0")

    inputs = tuple(doc.get("inputs") or ())
    outputs = tuple(doc.get("outputs") or ())
    return Dmc(matrix, input_labels=inputs, output_labels=outputs)


def load_channel_file(path: Union[str, Path]) -> Dmc:
    """读取信道文件"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"信道文件不存在: {path}")
    return load_channel(path.read_text(encoding="utf-8"))


def dump_channel(w: Dmc) -> str:
    """序列化为 JSON 文本；零元素输出为 0"""
    rows = []
    for row in w.matrix:
        rows.append([0 if v == 0 else float(v) for v in row])
    doc = {
        "inputs": list(w.input_labels),
        "outputs": list(w.output_labels),
        "matrix": rows,
    }
    return json.dumps(doc, indent=2)
