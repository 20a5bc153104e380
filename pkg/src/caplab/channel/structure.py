# caplab/channel/structure.py
"""
信道结构分析：支撑集、信道图、输出合并、乘积分解、q* 与模糊输出上界

所有“是否为零”的判断均直接比较存储的 0.0，不设阈值。
"""
from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

import networkx as nx
import numpy as np

from ..config_manager import get_config
from ..errors import ParameterError
from .types import ChannelGraph, Dmc, Factorization, SupportStructure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MergeResult:
    """输出合并结果；merge_map[y] 为原输出 y 的新下标，从不出现的输出为 None"""
    channel: Dmc
    merge_map: Tuple[Optional[int], ...]
    groups: Tuple[Tuple[int, ...], ...]

    @property
    def changed(self) -> bool:
        return any(len(g) > 1 for g in self.groups) or None in self.merge_map


@dataclass(frozen=True)
class QStar:
    """q* 及其见证 (x0, x1, Y0)"""
    value: float
    x0: int
    x1: int
    y0: FrozenSet[int]


# ========== 信道图 ==========
def _bipartite_graph(w: Dmc) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(("x", x) for x in range(w.input_size))
    g.add_nodes_from(("y", y) for y in range(w.output_size))
    xs, ys = np.nonzero(w.positive)
    g.add_edges_from((("x", int(x)), ("y", int(y))) for x, y in zip(xs, ys))
    return g


def channel_graph(w: Dmc) -> ChannelGraph:
    """
    构造信道图并判定无环

    二部图中的简单环必然交替经过互异的输入与输出、长度至少为 4，
    因此“不存在交替环”等价于该图为森林。
    """
    g = _bipartite_graph(w)
    acyclic = nx.is_forest(g) if g.number_of_edges() else True
    adjacency = w.positive.astype(np.int8)
    adjacency.setflags(write=False)
    return ChannelGraph(adjacency=adjacency, acyclic=bool(acyclic))


def find_alternating_cycle(w: Dmc) -> Optional[List[Tuple[int, int]]]:
    """返回一条交替环 [(x1, y1), (x2, y2), ...]，不存在时返回 None"""
    g = _bipartite_graph(w)
    try:
        edges = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return None
    cycle = []
    for u, v in edges:
        if u[0] == "x":
            cycle.append((u[1], v[1]))
    return cycle


def epsilon_noise_level(w: Dmc) -> Optional[float]:
    """
    若 X ⊆ Y（按标签匹配），返回满足 W(x|x) ≥ 1-ε 的最小 ε，否则返回 None
    """
    out_index = {label: j for j, label in enumerate(w.output_labels)}
    if not all(label in out_index for label in w.input_labels):
        return None
    diag = np.array([w.matrix[x, out_index[label]]
                     for x, label in enumerate(w.input_labels)])
    return float(max(0.0, np.max(1.0 - diag)))


def supports_and_graph(w: Dmc) -> SupportStructure:
    """支撑集 X(y)、信道图与 ε-noise 水平"""
    return SupportStructure(
        support_sets=w.support_sets,
        graph=channel_graph(w),
        epsilon_noise=epsilon_noise_level(w),
    )


# ========== 输出合并 ==========
def merge_equivalent_outputs(w: Dmc) -> MergeResult:
    """
    合并支撑集相同的输出（列相加），新符号继承最小原下标的位置

    从不出现的输出（空支撑集）被删除。
    """
    groups: "OrderedDict[FrozenSet[int], List[int]]" = OrderedDict()
    for y, support in enumerate(w.support_sets):
        if not support:
            continue
        groups.setdefault(support, []).append(y)

    merge_map: List[Optional[int]] = [None] * w.output_size
    columns = []
    labels = []
    for new_index, members in enumerate(groups.values()):
        for y in members:
            merge_map[y] = new_index
        columns.append(w.matrix[:, members].sum(axis=1))
        labels.append("+".join(w.output_labels[y] for y in members))

    merged = Dmc(np.column_stack(columns), input_labels=w.input_labels,
                 output_labels=tuple(labels))
    return MergeResult(channel=merged, merge_map=tuple(merge_map),
                       groups=tuple(tuple(m) for m in groups.values()))


def binary_input_reduce(w: Dmc) -> Dmc:
    """二输入信道化简为（非对称）二元删除信道"""
    if w.input_size != 2:
        raise ParameterError(f"binary_input_reduce 需要 2 个输入, 实际 {w.input_size}")
    reduced = merge_equivalent_outputs(w).channel
    if not channel_graph(reduced).acyclic:
        # 两输入、至多 3 个不同支撑集的二部图不可能含环
        raise AssertionError("二输入化简后的信道图含环")
    return reduced


# ========== 乘积分解 ==========
def check_factorization(w: Dmc) -> Optional[Factorization]:
    """
    寻找 A(x)、B(y) 使 W(y|x) = A(x)B(y) 在所有正元素上成立

    在对数域中沿每个连通分量的 BFS 树传播 a(x)+b(y) = log W(y|x)，
    再核对非树边，误差容限 limits.factorization_tol。

    Returns:
        Factorization 或 None（不存在分解）
    """
    tol = get_config().limits.factorization_tol
    g = _bipartite_graph(w)
    log_w = w.log_matrix
    a = np.zeros(w.input_size)
    b = np.zeros(w.output_size)

    components = 0
    for component in nx.connected_components(g):
        components += 1
        root = min(component)
        if root[0] == "x":
            a[root[1]] = 0.0
        else:
            b[root[1]] = 0.0
        for u, v in nx.bfs_edges(g, root):
            if u[0] == "x":
                b[v[1]] = log_w[u[1], v[1]] - a[u[1]]
            else:
                a[v[1]] = log_w[v[1], u[1]] - b[u[1]]

    xs, ys = np.nonzero(w.positive)
    err = np.abs(a[xs] + b[ys] - log_w[xs, ys])
    if err.size and float(err.max()) > tol:
        logger.debug(f"分解失败，最大对数残差 {float(err.max()):.3g}")
        return None
    return Factorization(a=np.exp(a), b=np.exp(b), components=components)


# ========== 零误差相关谓词 ==========
def disjoint_support_pairs(w: Dmc) -> List[Tuple[int, int]]:
    """所有 x < x' 且输出支撑不相交的输入对，按字典序"""
    overlap = (w.positive.astype(np.int64) @ w.positive.T.astype(np.int64)) > 0
    pairs = []
    for x in range(w.input_size):
        for x2 in range(x + 1, w.input_size):
            if not overlap[x, x2]:
                pairs.append((x, x2))
    return pairs


def has_positive_zero_error(w: Dmc) -> bool:
    """存在两个输出支撑不相交的输入"""
    return bool(disjoint_support_pairs(w))


def erasure_positive(w: Dmc) -> bool:
    """存在 x, x', y 使 W(y|x) > W(y|x') = 0，即某输出的支撑集非空且非全集"""
    counts = w.positive.sum(axis=0)
    return bool(np.any((counts > 0) & (counts < w.input_size)))


def cutoff_positive(w: Dmc) -> bool:
    """存在 x, x', y 使 W(y|x) ≠ W(y|x')"""
    return bool(np.any(w.matrix != w.matrix[0]))


def q_star(w: Dmc) -> QStar:
    """
    q* = max_{(x0, x1)} W(Z(x0)|x1)，Z(x0) = {y : W(y|x0) = 0}

    同值时取字典序最小的 (x0, x1)；两输入支撑不相交时值精确为 1。
    """
    best = QStar(value=0.0, x0=0, x1=0, y0=frozenset())
    zero = ~w.positive
    for x0 in range(w.input_size):
        z = zero[x0]
        if not z.any():
            continue
        for x1 in range(w.input_size):
            if x1 == x0:
                continue
            if not np.any(w.positive[x1] & ~z):
                mass = 1.0
            else:
                mass = float(w.matrix[x1, z].sum())
            if mass > best.value:
                best = QStar(value=mass, x0=x0, x1=x1,
                             y0=frozenset(int(y) for y in np.flatnonzero(z)))
    return best


def ambiguous_output_upper_bound(w: Dmc, rho: float) -> float:
    """
    -ρ⁻¹ log min_x W(Y_amb|x)，Y_amb = {y : X(y) = X}；Y_amb 为空时为 +inf
    """
    if not rho > 0:
        raise ParameterError(f"ρ 必须为正, 实际 {rho}")
    amb = w.positive.all(axis=0)
    if not amb.any():
        return math.inf
    if amb.all():
        return 0.0
    q_amb = float(w.matrix[:, amb].sum(axis=1).min())
    if q_amb <= 0:
        return math.inf
    return -math.log(q_amb) / rho
