# caplab/listsim/moments.py
"""
列表长度矩的精确枚举与 Monte Carlo 估计

    list_moment   = E[|L(Y)|^ρ]
    cutoff_moment = E[|L(M,Y)|^ρ]
    erasure_prob  = Pr(|L(Y)| ≥ 2)
    ml_error_prob = Pr(|L(M,Y)| ≥ 2)

消息均匀分布。
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np
from numpy.random import SeedSequence, default_rng
from scipy.special import logsumexp

from ..config_manager import get_config
from ..errors import ParameterError, SizeCapError
from ..channel.product import all_sequences
from ..channel.types import Dmc
from ..gallager.e0 import maximize_e0
from ..parallel import run_tasks
from .codes import TIE_TOL, Code, log_likelihoods, prefix_indices

logger = logging.getLogger(__name__)

# 一次成对比较所用的布尔数组规模
PAIRWISE_BUDGET = 1 << 24


@dataclass(frozen=True)
class MomentReport:
    rho: float
    list_moment: float
    cutoff_moment: float
    erasure_prob: float
    ml_error_prob: float
    method: str
    trials: Optional[int] = None
    seed: Optional[int] = None
    list_std_error: Optional[float] = None
    cutoff_std_error: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _check_rho(rho: float) -> None:
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")


def _at_least_as_likely(ll: np.ndarray, tol: float) -> np.ndarray:
    """(M, B)：每个 (m, y) 似然不低于 m 的消息数"""
    messages, width = ll.shape
    counts = np.empty((messages, width), dtype=np.int64)
    step = max(1, PAIRWISE_BUDGET // max(1, messages * messages))
    for start in range(0, width, step):
        block = ll[:, start:start + step]
        counts[:, start:start + step] = (
            block[None, :, :] >= block[:, None, :] - tol).sum(axis=1)
    return counts


def exact_moments(code: Code, rho: float, w: Dmc) -> MomentReport:
    """
    遍历全部 y ∈ Y^n 的精确矩（|Y|^n ≤ limits.enumeration_cap）

    L(m,y) 的并列全部计入。
    """
    _check_rho(rho)
    code.check_channel(w)
    cap = get_config().limits.enumeration_cap
    total = w.output_size ** code.n
    if total > cap:
        raise SizeCapError(f"|Y|^n = {total} 超过枚举上限 {cap}")

    ys = all_sequences(w.output_size, code.n)
    tol = TIE_TOL * code.n
    inv_m = 1.0 / code.messages
    list_m = cutoff_m = erasure = ml_error = 0.0
    chunk = max(1, PAIRWISE_BUDGET // max(1, code.messages * code.messages))
    for start in range(0, total, chunk):
        ll = log_likelihoods(code, w, ys[start:start + chunk])
        prob = np.exp(ll) * inv_m
        p_y = prob.sum(axis=0)
        sizes = np.isfinite(ll).sum(axis=0)
        list_m += float(np.sum(p_y * sizes.astype(float) ** rho))
        erasure += float(np.sum(p_y[sizes >= 2]))

        ranks = _at_least_as_likely(ll, tol).astype(float)
        live = prob > 0
        cutoff_m += float(np.sum(prob[live] * ranks[live] ** rho))
        ml_error += float(np.sum(prob[live & (ranks >= 2)]))

    return MomentReport(
        rho=float(rho),
        list_moment=list_m,
        cutoff_moment=cutoff_m,
        erasure_prob=min(1.0, erasure),
        ml_error_prob=min(1.0, ml_error),
        method="exact",
    )


# ========== Monte Carlo ==========
def cumulative_rows(w: Dmc) -> np.ndarray:
    """逐行累积分布；最后一个正元素之后置 1，舍入误差不会落到结构零上"""
    cumulative = np.cumsum(w.matrix, axis=1)
    last = w.output_size - 1 - np.argmax(w.positive[:, ::-1], axis=1)
    cumulative[np.arange(w.output_size)[None, :] >= last[:, None]] = 1.0
    return cumulative


def draw_outputs(cumulative: np.ndarray, xs: np.ndarray,
                 rng: np.random.Generator) -> np.ndarray:
    """对任意形状的输入符号数组逐元素抽取输出"""
    u = rng.random(xs.shape)
    return (u[..., None] < cumulative[xs]).argmax(axis=-1)


def sample_outputs(code: Code, w: Dmc, messages: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    """按信道（及反馈）逐时刻抽取输出序列，形状 (B, n)"""
    cumulative = cumulative_rows(w)
    ys = np.zeros((messages.size, code.n), dtype=np.int64)
    for i in range(code.n):
        prefixes = prefix_indices(ys, i, w.output_size)
        ys[:, i] = draw_outputs(cumulative, code.encode(i, messages, prefixes), rng)
    return ys


def block_rng(seed: int, block: int) -> np.random.Generator:
    """第 block 个试验块的随机数流"""
    return default_rng(SeedSequence([int(seed), int(block)]))


def trial_blocks(trials: int) -> List[Tuple[int, int]]:
    size = get_config().runtime.mc_block_size
    blocks = (trials + size - 1) // size
    return [(b, min(size, trials - b * size)) for b in range(blocks)]


def _mc_block(code: Code, w: Dmc, rho: float, seed: int, block: int,
              count: int) -> np.ndarray:
    rng = block_rng(seed, block)
    messages = rng.integers(code.messages, size=count)
    ys = sample_outputs(code, w, messages, rng)
    ll = log_likelihoods(code, w, ys)
    sizes = np.isfinite(ll).sum(axis=0).astype(float)
    own = ll[messages, np.arange(count)]
    ranks = (ll >= own[None, :] - TIE_TOL * code.n).sum(axis=0).astype(float)
    list_pow = sizes ** rho
    rank_pow = ranks ** rho
    return np.array([
        list_pow.sum(), (list_pow ** 2).sum(),
        rank_pow.sum(), (rank_pow ** 2).sum(),
        float((sizes >= 2).sum()), float((ranks >= 2).sum()),
    ])


def standard_error(total: float, total_sq: float, trials: int) -> float:
    if trials < 2:
        return math.nan
    mean = total / trials
    var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
    return math.sqrt(var / trials)


def mc_moments(code: Code, rho: float, w: Dmc, trials: int,
               seed: int = 0) -> MomentReport:
    """
    Monte Carlo 估计

    试验按 runtime.mc_block_size 分块，第 b 块使用 SeedSequence([seed, b])，
    结果与线程数无关。
    """
    _check_rho(rho)
    code.check_channel(w)
    if trials < 1:
        raise ParameterError(f"trials 必须 ≥ 1, 实际 {trials}")

    sums = run_tasks(lambda blk: _mc_block(code, w, rho, seed, blk[0], blk[1]),
                     trial_blocks(trials))
    s = np.sum(sums, axis=0)
    return MomentReport(
        rho=float(rho),
        list_moment=s[0] / trials,
        cutoff_moment=s[2] / trials,
        erasure_prob=s[4] / trials,
        ml_error_prob=s[5] / trials,
        method="monte_carlo",
        trials=int(trials),
        seed=int(seed),
        list_std_error=standard_error(s[0], s[1], trials),
        cutoff_std_error=standard_error(s[2], s[3], trials),
    )


# ========== 猜测不等式下界 ==========
@dataclass(frozen=True)
class CutoffLowerBound:
    """cutoff_moment 的下界：逐 y 求和的形式与单字母松弛"""
    exact_sum: float
    single_letter: float


def cutoff_moment_lower_bound(code: Code, rho: float, w: Dmc) -> CutoffLowerBound:
    """
    (1+log M)^{-ρ} Σ_y (Σ_m (W(y|m)/M)^{1/(1+ρ)})^{1+ρ}
    及其松弛 (1+log M)^{-ρ} M^ρ e^{-n max_P E0(ρ,P)}

    |L(m,y)| 不小于 m 在最大似然猜测顺序中的位置，
    故两式对任意码本和反馈策略都是 cutoff_moment 的下界。
    """
    _check_rho(rho)
    code.check_channel(w)
    cap = get_config().limits.enumeration_cap
    total = w.output_size ** code.n
    if total > cap:
        raise SizeCapError(f"|Y|^n = {total} 超过枚举上限 {cap}")

    messages = code.messages
    log_m = math.log(messages)
    power = 1.0 / (1.0 + rho)
    ys = all_sequences(w.output_size, code.n)
    chunk = max(1, PAIRWISE_BUDGET // messages)
    parts = []
    for start in range(0, total, chunk):
        ll = log_likelihoods(code, w, ys[start:start + chunk]) - log_m
        inner = logsumexp(power * ll, axis=0)
        parts.append((1.0 + rho) * inner[np.isfinite(inner)])
    log_sum = float(logsumexp(np.concatenate(parts)))
    prefactor = -rho * math.log1p(log_m)

    e0_max = maximize_e0(rho, w).e0_value
    single = prefactor + rho * log_m - code.n * e0_max
    return CutoffLowerBound(exact_sum=math.exp(prefactor + log_sum),
                            single_letter=math.exp(single))
