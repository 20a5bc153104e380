"""共享的信道夹具与配置隔离"""
import math

import numpy as np
import pytest

from caplab.config_manager import GlobalConfig, set_config
from caplab.channel import Dmc, Pmf
from caplab.channel.fixtures import bec, bsc, fig1, fig2, noiseless, z_channel

LN2 = math.log(2.0)
LN3 = math.log(3.0)


@pytest.fixture(autouse=True)
def default_config():
    """每个测试使用默认配置，测试内部的修改不会泄漏"""
    config = GlobalConfig.default()
    set_config(config)
    yield config
    set_config(GlobalConfig.default())


@pytest.fixture
def bsc01():
    return bsc(0.1)


@pytest.fixture
def bec05():
    return bec(0.5)


@pytest.fixture
def fig1_channel():
    return fig1(0.1)


@pytest.fixture
def fig2_channel():
    return fig2(0.01, 0.05)


@pytest.fixture
def z01():
    return z_channel(0.1)


@pytest.fixture
def noiseless2():
    return noiseless(2)


@pytest.fixture
def noiseless3():
    return noiseless(3)


@pytest.fixture
def all_positive():
    return Dmc([[0.6, 0.4], [0.3, 0.7]])


@pytest.fixture
def uniform2():
    return Pmf.uniform(2)


def binary_entropy(p: float) -> float:
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def grid_pi0(w: Dmc, step: float) -> float:
    """
    单纯形网格 {计数/m} 上的 min_P max_y P(X(y))

    前 k-2 个坐标枚举，最后两个坐标 (c, r-c) 上每个 P(X(y)) 是斜率 ∈ {-1, 0, 1}
    的直线，最大值对 c 是凸的，只需检查端点与两组直线的交点两侧的整数。
    """
    k = w.input_size
    m = int(round(1.0 / step))
    pos = w.positive.astype(np.int64)
    if k == 1:
        return float(pos[0].max())

    prefixes = _prefix_counts(m, k - 2)
    rest = m - prefixes.sum(axis=1)
    base = prefixes @ pos[:k - 2]
    intercept = (base + pos[k - 1][None, :] * rest[:, None]).astype(float)
    slope = pos[k - 2] - pos[k - 1]

    def group_max(mask: np.ndarray) -> np.ndarray:
        if not mask.any():
            return np.full(len(rest), -np.inf)
        return intercept[:, mask].max(axis=1)

    down, flat, up = (group_max(slope == s) for s in (-1, 0, 1))
    with np.errstate(invalid="ignore"):
        centre = np.nan_to_num((down - up) / 2.0, nan=0.0, posinf=np.inf,
                               neginf=-np.inf)
    best = np.full(len(rest), np.inf)
    for c in (np.zeros_like(rest), rest, np.floor(centre), np.ceil(centre)):
        c = np.clip(c, 0, rest)
        best = np.minimum(best, np.maximum.reduce([down - c, flat, up + c]))
    return float(best.min()) / m


def _prefix_counts(m: int, j: int) -> np.ndarray:
    """全部长度 j、分量和 ≤ m 的非负整数向量"""
    if j == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if j == 1:
        return np.arange(m + 1, dtype=np.int64)[:, None]
    blocks = []
    for first in range(m + 1):
        tail = _prefix_counts(m - first, j - 1)
        head = np.full((len(tail), 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, tail]))
    return np.vstack(blocks)
