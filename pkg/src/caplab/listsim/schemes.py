# caplab/listsim/schemes.py
"""
两种带反馈的列表编码方案的仿真

三阶段方案（需要 Cal > 0）：
  1. 分组长度 n、速率 R 的码，译码器给出 ℓ 个最可能的消息（并列按消息下标）；
  2. 发送 n' 次 x1（正确消息在列表中）或 x0，接收端见到 Y0 中的符号即知其在列表中；
  3. 发送 ℓ 个互不重叠 x1 图样之一（长度 kℓ），见到 Y0 即确定位置。
  最终列表长度为 M（阶段 1 或 2 失败）、ℓ（阶段 3 失败）或 1。

型方案（需要 Czero > 0）：
  常组分码本，反馈后用零误差码告知条件型 V 与子列表编号，
  M(y,V) 按消息升序切成长度 ⌈e^{-nα}|M(y,V)|⌉ 的连续块。
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.random import SeedSequence, default_rng

from ..config_manager import get_config
from ..errors import ParameterError, SizeCapError
from ..channel.product import all_sequences
from ..channel.structure import (
    erasure_positive,
    has_positive_zero_error,
    merge_equivalent_outputs,
    q_star,
)
from ..channel.typeclass import TypeClass, closest_type, composition_count
from ..channel.types import Dmc, Pmf
from ..gallager.e0 import maximize_e0
from ..parallel import run_tasks
from .codes import Codebook, log_likelihoods, zero_error_pair_code
from .moments import (
    PAIRWISE_BUDGET,
    block_rng,
    cumulative_rows,
    draw_outputs,
    exact_moments,
    mc_moments,
    sample_outputs,
    standard_error,
    trial_blocks,
)

logger = logging.getLogger(__name__)

# 码本随机流与试验块随机流分开
CODEBOOK_STREAM = 1
# ⌈·⌉ 前扣除的舍入余量
CEIL_SLACK = 1e-9


def message_count(n: int, rate: float) -> int:
    """⌊e^{nR}⌋，至少为 1"""
    if n < 1:
        raise ParameterError(f"n 必须 ≥ 1, 实际 {n}")
    if rate < 0:
        raise ParameterError(f"速率必须非负, 实际 {rate}")
    return max(1, int(math.floor(math.exp(n * rate) + CEIL_SLACK)))


def codebook_rng(seed: int) -> np.random.Generator:
    return default_rng(SeedSequence(int(seed), spawn_key=(CODEBOOK_STREAM,)))


def _ceil(value: float) -> int:
    return int(math.ceil(value - CEIL_SLACK))


# ========== 三阶段方案 ==========
@dataclass(frozen=True)
class Thm4Result:
    """
    三阶段方案的仿真结果

    e1_freq = Pr(E1)，e2_freq = Pr(非E1 且 E2)，e3_freq = Pr(非E1 且 非E2 且 E3)；
    e3_given_reached 为进入第三阶段后失败的条件频率。
    """
    n: int
    messages: int
    rate: float
    r_eff: float
    rho: float
    moment: float
    se: float
    e1_freq: float
    e2_freq: float
    e3_freq: float
    e3_given_reached: float
    reached: int
    trials: int
    seed: int
    ell: int
    k: int
    nprime: int
    q_star: float

    def to_row(self) -> dict:
        return {"n": self.n, "R_eff": self.r_eff, "rho": self.rho,
                "moment": self.moment, "se": self.se,
                "E1_freq": self.e1_freq, "E2_freq": self.e2_freq,
                "E3_freq": self.e3_freq, "seed": self.seed}

    def to_dict(self) -> dict:
        return asdict(self)


def _thm4_block(code: Codebook, w: Dmc, rho: float, ell: int, k: int, nprime: int,
                x0: int, x1: int, y0: np.ndarray, seed: int, block: int,
                count: int) -> np.ndarray:
    rng = block_rng(seed, block)
    cumulative = cumulative_rows(w)
    messages = rng.integers(code.messages, size=count)
    ys = sample_outputs(code, w, messages, rng)

    # 阶段 1：按 (似然降序, 消息下标) 排序后的位置
    ll = log_likelihoods(code, w, ys)
    order = np.argsort(-ll, axis=0, kind="stable")
    position = np.argmax(order == messages[None, :], axis=0)
    on_list = position < ell

    # 阶段 2
    symbol = np.where(on_list, x1, x0)
    phase2 = draw_outputs(cumulative, np.repeat(symbol[:, None], nprime, axis=1), rng)
    seen2 = y0[phase2].any(axis=1)

    # 阶段 3：只有 x1 所在的 k 个位置可能落入 Y0
    phase3 = draw_outputs(cumulative, np.full((count, k), x1), rng)
    seen3 = y0[phase3].any(axis=1)

    e1 = ~on_list
    e2 = on_list & ~seen2
    reached = on_list & seen2
    e3 = reached & ~seen3
    lengths = np.where(e1 | e2, code.messages, np.where(e3, ell, 1)).astype(float)
    powers = lengths ** rho
    return np.array([powers.sum(), (powers ** 2).sum(), e1.sum(), e2.sum(), e3.sum(),
                     reached.sum()], dtype=float)


def simulate_thm4_scheme(w: Dmc, rho: float, rate: float, n: int, ell: int, k: int,
                         nprime: int, trials: int, seed: int = 0,
                         code: Optional[Codebook] = None,
                         p: Optional[Pmf] = None) -> Thm4Result:
    """
    仿真三阶段方案

    Args:
        w: 信道，需存在 W(y|x) > W(y|x') = 0
        rho: ρ > 0
        rate: 第一阶段速率 R（nats），消息数 ⌊e^{nR}⌋
        n: 第一阶段分组长度
        ell: 列表长度 ℓ
        k: 第三阶段每个位置的重复次数
        nprime: 第二阶段重复次数 n'
        trials: 试验次数
        seed: 随机种子
        code: 第一阶段码本，默认按 p 独立抽取
        p: 抽取码本的输入分布，默认 E0(ρ,·) 的最大点

    Returns:
        Thm4Result
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    if ell < 1:
        raise ParameterError(f"ℓ 必须 ≥ 1, 实际 {ell}")
    if k < 1:
        raise ParameterError(f"k 必须 ≥ 1, 实际 {k}")
    if nprime < 1:
        raise ParameterError(f"n' 必须 ≥ 1, 实际 {nprime}")
    if trials < 1:
        raise ParameterError(f"trials 必须 ≥ 1, 实际 {trials}")
    if not erasure_positive(w):
        raise ParameterError("信道不存在 W(y|x) > W(y|x') = 0，三阶段方案不适用")

    qs = q_star(w)
    y0 = np.zeros(w.output_size, dtype=bool)
    y0[list(qs.y0)] = True

    if code is None:
        p = p or maximize_e0(rho, w).p_star
        code = Codebook.random_iid(message_count(n, rate), n, p.probs,
                                   codebook_rng(seed))
    code.check_channel(w)
    n = code.n
    ell_eff = min(ell, code.messages)

    sums = run_tasks(
        lambda blk: _thm4_block(code, w, rho, ell_eff, k, nprime, qs.x0, qs.x1, y0,
                                seed, blk[0], blk[1]),
        trial_blocks(trials))
    s = np.sum(sums, axis=0)
    reached = int(s[5])
    raw_rate = code.rate
    result = Thm4Result(
        n=n,
        messages=code.messages,
        rate=raw_rate,
        r_eff=raw_rate / (1.0 + nprime / n + k * ell / n),
        rho=float(rho),
        moment=s[0] / trials,
        se=standard_error(s[0], s[1], trials),
        e1_freq=s[2] / trials,
        e2_freq=s[3] / trials,
        e3_freq=s[4] / trials,
        e3_given_reached=s[4] / reached if reached else math.nan,
        reached=reached,
        trials=int(trials),
        seed=int(seed),
        ell=int(ell),
        k=int(k),
        nprime=int(nprime),
        q_star=qs.value,
    )
    logger.debug(f"三阶段方案 n={n}, M={code.messages}: E[L^ρ] = {result.moment:.6g}")
    return result


def thm4_rate_ladder(w: Dmc, rho: float, rate: float, ns: Sequence[int] = (4, 6, 8),
                     ell: int = 4, k: int = 1, nprime: int = 1, trials: int = 20_000,
                     seed: int = 0) -> pd.DataFrame:
    """
    在递增的 n 上运行三阶段方案，并给出合并输出后无反馈信道上
    同速率随机码的精确 cutoff 矩作对照

    Returns:
        DataFrame: 仿真列之外增加 merged_cutoff_moment
    """
    merged = merge_equivalent_outputs(w).channel
    merged_p = maximize_e0(rho, merged).p_star
    limit = get_config().limits.enumeration_cap
    rows = []
    for n in ns:
        sim = simulate_thm4_scheme(w, rho, rate, n, ell, k, nprime, trials, seed)
        code = Codebook.random_iid(message_count(n, rate), n, merged_p.probs,
                                   codebook_rng(seed))
        if merged.output_size ** n <= limit:
            merged_moment = exact_moments(code, rho, merged).cutoff_moment
        else:
            merged_moment = mc_moments(code, rho, merged, trials, seed).cutoff_moment
        row = sim.to_row()
        row["merged_cutoff_moment"] = merged_moment
        rows.append(row)
    return pd.DataFrame(rows)


# ========== 型方案 ==========
@dataclass(frozen=True)
class TypeSchemeResult:
    """
    型方案的仿真结果

    exact_moment 为固定码本上的精确矩；partition_bound 与 relaxed_bound
    依次为 E[⌈e^{-nα}|M(y,V)|⌉^ρ] 与 1 + 2^ρ e^{-nρα} E[|M(y,V)|^ρ]。
    """
    n: int
    messages: int
    rate: float
    r_eff: float
    rho: float
    alpha: float
    p_type: Tuple[int, ...]
    moment: float
    se: float
    trials: int
    seed: int
    phase2_uses: int
    phase3_uses: int
    max_sublist: int
    exact_moment: Optional[float] = None
    partition_bound: Optional[float] = None
    relaxed_bound: Optional[float] = None

    def to_row(self) -> dict:
        return {"n": self.n, "R_eff": self.r_eff, "rho": self.rho,
                "moment": self.moment, "se": self.se,
                "E1_freq": 0.0, "E2_freq": 0.0, "E3_freq": 0.0,
                "seed": self.seed}

    def to_dict(self) -> dict:
        return asdict(self)


def _joint_type_keys(codewords: np.ndarray, ys: np.ndarray, input_size: int,
                     output_size: int) -> np.ndarray:
    """(B, M)：码字与 y 的条件型编号，相同编号即相同条件型"""
    cells = input_size * output_size
    flat = codewords[None, :, :] * output_size + ys[:, None, :]
    counts = (flat[..., None] == np.arange(cells)).sum(axis=2)
    _, keys = np.unique(counts.reshape(-1, cells), axis=0, return_inverse=True)
    return keys.reshape(ys.shape[0], codewords.shape[0])


def _sublists(keys: np.ndarray, shrink: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    (B, M)：|M(y,V_m)| 与消息 m 所在子列表的长度

    子列表按消息升序的连续块，块长 ⌈shrink·|M(y,V)|⌉。
    """
    messages = keys.shape[1]
    same = keys[:, :, None] == keys[:, None, :]
    size = same.sum(axis=2)
    earlier = np.tril(np.ones((messages, messages), dtype=bool), -1)
    rank = (same & earlier[None, :, :]).sum(axis=2)
    block = np.maximum(1, np.ceil(shrink * size - CEIL_SLACK)).astype(np.int64)
    start = (rank // block) * block
    length = np.minimum(block, size - start)
    return size, length


def _type_block(code: Codebook, w: Dmc, rho: float, shrink: float, seed: int,
                block: int, count: int) -> np.ndarray:
    rng = block_rng(seed, block)
    messages = rng.integers(code.messages, size=count)
    ys = sample_outputs(code, w, messages, rng)
    total = np.zeros(3)
    step = max(1, PAIRWISE_BUDGET // max(1, code.messages * code.messages))
    for start in range(0, count, step):
        sub = slice(start, start + step)
        keys = _joint_type_keys(code.codewords, ys[sub], w.input_size, w.output_size)
        _, length = _sublists(keys, shrink=shrink)
        own = length[np.arange(keys.shape[0]), messages[sub]].astype(float)
        powers = own ** rho
        total[0] += powers.sum()
        total[1] += (powers ** 2).sum()
        total[2] = max(total[2], own.max())
    return total


def _type_exact(code: Codebook, w: Dmc, rho: float, shrink: float,
                alpha: float) -> Tuple[float, float, float]:
    """固定码本上的精确矩、分块长度界与松弛界"""
    ys = all_sequences(w.output_size, code.n)
    inv_m = 1.0 / code.messages
    exact = partition = relaxed_sum = 0.0
    step = max(1, PAIRWISE_BUDGET // max(1, code.messages * code.messages))
    for start in range(0, ys.shape[0], step):
        chunk = ys[start:start + step]
        prob = (np.exp(log_likelihoods(code, w, chunk)) * inv_m).T
        keys = _joint_type_keys(code.codewords, chunk, w.input_size, w.output_size)
        size, length = _sublists(keys, shrink=shrink)
        exact += float(np.sum(prob * length.astype(float) ** rho))
        partition += float(np.sum(prob * np.ceil(shrink * size - CEIL_SLACK) ** rho))
        relaxed_sum += float(np.sum(prob * size.astype(float) ** rho))
    relaxed = 1.0 + 2.0 ** rho * math.exp(-code.n * rho * alpha) * relaxed_sum
    return exact, partition, relaxed


def simulate_type_scheme(w: Dmc, rho: float, rate: float, n: int, alpha: float,
                         trials: int, seed: int = 0, p: Optional[Pmf] = None,
                         exact: bool = True) -> TypeSchemeResult:
    """
    仿真型方案

    Args:
        w: 信道，需 Czero > 0
        rho: ρ > 0
        rate: 第一阶段速率 R，消息数 ⌊e^{nR}⌋
        n: 分组长度
        alpha: 子列表个数 e^{nα}
        trials: 试验次数
        seed: 随机种子
        p: 目标输入分布，取全变差最近的型；默认 E0(ρ,·) 的最大点
        exact: |Y|^n 不超过枚举上限时同时计算固定码本上的精确值

    Returns:
        TypeSchemeResult
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")
    if not alpha > 0:
        raise ParameterError(f"α 必须 > 0, 实际 {alpha}")
    if trials < 1:
        raise ParameterError(f"trials 必须 ≥ 1, 实际 {trials}")
    if not has_positive_zero_error(w):
        raise ParameterError("零误差容量为 0，型方案不适用")

    p = p or maximize_e0(rho, w).p_star
    w.check_input(p)
    p_type: TypeClass = closest_type(p, n)
    code = Codebook.random_constant_composition(message_count(n, rate),
                                                p_type.base_sequence(),
                                                w.input_size, codebook_rng(seed))

    # 阶段 2、3 的零误差码开销（每次信道使用传 1 比特）
    type_count = 1
    for c in p_type.counts:
        type_count *= composition_count(c, w.output_size)
    bits2 = max(0, math.ceil(math.log2(type_count))) if type_count > 1 else 0
    bits3 = max(0, _ceil(n * alpha / math.log(2)))
    phase2_uses = zero_error_pair_code(w, bits2).n if bits2 else 0
    phase3_uses = zero_error_pair_code(w, bits3).n if bits3 else 0

    shrink = math.exp(-n * alpha)
    sums = run_tasks(
        lambda blk: _type_block(code, w, rho, shrink, seed, blk[0], blk[1]),
        trial_blocks(trials))
    s = np.sum(sums, axis=0)
    max_sublist = int(max(part[2] for part in sums))

    exact_moment = partition_bound = relaxed_bound = None
    if exact:
        if w.output_size ** n <= get_config().limits.enumeration_cap:
            exact_moment, partition_bound, relaxed_bound = _type_exact(
                code, w, rho, shrink, alpha)
        else:
            logger.info(f"|Y|^n = {w.output_size ** n} 超过枚举上限，跳过精确值")

    raw_rate = code.rate
    return TypeSchemeResult(
        n=n,
        messages=code.messages,
        rate=raw_rate,
        r_eff=raw_rate * n / (n + phase2_uses + phase3_uses),
        rho=float(rho),
        alpha=float(alpha),
        p_type=p_type.counts,
        moment=s[0] / trials,
        se=standard_error(s[0], s[1], trials),
        trials=int(trials),
        seed=int(seed),
        phase2_uses=phase2_uses,
        phase3_uses=phase3_uses,
        max_sublist=max_sublist,
        exact_moment=exact_moment,
        partition_bound=partition_bound,
        relaxed_bound=relaxed_bound,
    )
