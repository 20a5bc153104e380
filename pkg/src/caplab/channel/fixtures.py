# caplab/channel/fixtures.py
"""
内置信道族

命令行与测试通过名称获取，如 get_channel("fig1", eps=0.01)
或 parse_channel_string("fig2:eps=0.01,delta=0.05")。
"""
from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from ..errors import ParameterError
from .types import Dmc


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} 必须在 [0, 1] 内, 实际 {value}")


def noiseless(k: int = 2) -> Dmc:
    """k 元无噪信道"""
    k = int(k)
    if k < 1:
        raise ParameterError(f"字母表大小必须为正, 实际 {k}")
    return Dmc(np.eye(k))


def bsc(p: float = 0.1) -> Dmc:
    """二元对称信道"""
    _check_prob("p", p)
    return Dmc([[1 - p, p], [p, 1 - p]])


def bec(delta: float = 0.5) -> Dmc:
    """二元删除信道，输出 {0, e, 1}"""
    _check_prob("delta", delta)
    return Dmc([[1 - delta, delta, 0.0], [0.0, delta, 1 - delta]],
               input_labels=("0", "1"), output_labels=("0", "e", "1"))


def z_channel(q: float = 0.1) -> Dmc:
    """Z 信道：输入 0 无差错，输入 1 以概率 q 变为 0"""
    _check_prob("q", q)
    return Dmc([[1.0, 0.0], [q, 1 - q]])


def fig1(eps: float = 0.1) -> Dmc:
    """BSC(ε) 加一条与之不相交的无噪输入/输出"""
    _check_prob("eps", eps)
    return Dmc([[1 - eps, eps, 0.0],
                [eps, 1 - eps, 0.0],
                [0.0, 0.0, 1.0]])


def fig2(eps: float = 0.01, delta: float = 0.05) -> Dmc:
    """
    第三个输入以 1-δ 的概率落在前两个输出上：零误差容量为 0，
    而截止率可以接近 log 3
    """
    _check_prob("eps", eps)
    _check_prob("delta", delta)
    return Dmc([[1 - eps, eps, 0.0],
                [eps, 1 - eps, 0.0],
                [(1 - delta) / 2, (1 - delta) / 2, delta]])


def epsilon_noise(eps: float = 0.01) -> Dmc:
    """三元 ε-noise 信道，W(2|0) 为结构零"""
    _check_prob("eps", eps)
    return Dmc([[1 - eps, eps, 0.0],
                [eps / 2, 1 - eps, eps / 2],
                [eps / 2, eps / 2, 1 - eps]])


def random_channel(rows: int = 3, cols: int = 3, seed: int = 0,
                   zero_prob: float = 0.3) -> Dmc:
    """
    随机信道：每个元素以 zero_prob 的概率置为结构零，
    每行至少保留一个正元素，正元素按 Dirichlet(1) 分配
    """
    rows, cols = int(rows), int(cols)
    rng = np.random.default_rng(int(seed))
    matrix = np.zeros((rows, cols))
    for x in range(rows):
        mask = rng.random(cols) >= zero_prob
        if not mask.any():
            mask[rng.integers(cols)] = True
        matrix[x, mask] = rng.dirichlet(np.ones(int(mask.sum())))
    return Dmc(matrix)


# 信道注册表
CHANNELS: Dict[str, Callable[..., Dmc]] = {
    "noiseless": noiseless,
    "bsc": bsc,
    "bec": bec,
    "z": z_channel,
    "fig1": fig1,
    "fig2": fig2,
    "epsnoise": epsilon_noise,
    "random": random_channel,
}


def get_channel(name: str, **kwargs: float) -> Dmc:
    """
    按名称构造内置信道

    Example:
        >>> get_channel("fig1", eps=0.01)
        >>> get_channel("random", rows=4, cols=4, seed=7)
    """
    if name not in CHANNELS:
        raise ParameterError(f"未知的信道: {name}. 可选: {list(CHANNELS.keys())}")
    try:
        return CHANNELS[name](**kwargs)
    except TypeError as e:
        raise ParameterError(f"信道 {name} 的参数无效: {e}") from e


def parse_channel_string(text: str) -> Dmc:
    """解析 "name:key=value,key=value" 形式的信道描述"""
    name, _, params = text.partition(":")
    kwargs = {}
    for item in filter(None, params.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ParameterError(f"无法解析信道参数: {item!r}")
        try:
            number = float(value)
        except ValueError as e:
            raise ParameterError(f"信道参数不是数值: {item!r}") from e
        kwargs[key.strip()] = int(number) if number.is_integer() and key.strip() in (
            "k", "rows", "cols", "seed") else number
    return get_channel(name.strip(), **kwargs)
