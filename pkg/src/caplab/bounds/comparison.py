# caplab/bounds/comparison.py
"""
界的排序核对

对同一信道在一组共享的输入分布上计算全部上下界，
核对 Forney ≤ 常组分、各下界 ≤ 对应上界，并标记违例。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import ParameterError
from ..channel.fixtures import random_channel
from ..channel.structure import merge_equivalent_outputs
from ..channel.types import Dmc, Pmf
from ..capacity.pi0 import Pi0Result, pi0
from ..capacity.report import feedback_capacity_report
from ..capacity.shannon import CapacityResult, shannon_capacity
from ..gallager.e0 import maximize_e0
from ..parallel import run_tasks
from ..simplex import dirichlet_starts
from .constant_composition import const_comp_bounds
from .feedback import E0Curve
from .forney import forney_cal_rho_bound, forney_ceo_bound, maximize_forney

logger = logging.getLogger(__name__)

ORDER_TOL = 1e-7

COLUMNS = ["name", "kind", "target", "value_nats", "rho", "p_vector",
           "certificate_residual", "tag", "violation"]


@dataclass
class ComparisonReport:
    table: pd.DataFrame
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _fmt_p(p: Optional[Pmf]) -> str:
    return "" if p is None else " ".join(f"{v:.12g}" for v in p.probs)


def _shared_distributions(w: Dmc, named: Dict[str, Pmf],
                          extra: Sequence[Pmf]) -> List[Tuple[str, Pmf]]:
    k = w.input_size
    shared: List[Tuple[str, Pmf]] = [("uniform", Pmf.uniform(k))]
    shared += list(named.items())
    if k == 2:
        shared += [(f"t={t:g}", Pmf(np.array([t, 1.0 - t]))) for t in (0.25, 0.75)]
    shared += [(f"extra{i}", p) for i, p in enumerate(extra)]
    return shared


def bound_comparison_report(rho: float, w: Dmc, extra_p: Sequence[Pmf] = (),
                            tol: Optional[float] = None,
                            capacity: Optional[CapacityResult] = None,
                            pi0_result: Optional[Pi0Result] = None,
                            curve: Optional[E0Curve] = None) -> ComparisonReport:
    """
    计算并核对全部界

    核对项：
      forney_cal_rho(P) ≤ const_comp_cal(P)、forney_ceo(P) ≤ const_comp_ceo(P)（同一 P）；
      每个 Cal 下界 ≤ calf_upper；每个 Ceo/Cal 下界 ≤ shannon_c；calf_lower ≤ calf_upper。

    Args:
        rho: ρ > 0
        w: 信道
        extra_p: 附加的共享输入分布
        tol: 求解器容限
        capacity: 已算好的 Shannon 容量（与 ρ 无关，可在多个 ρ 间复用）
        pi0_result: 已算好的 π0
        curve: 同一信道的 E0 曲线缓存

    Returns:
        ComparisonReport: 表格列见 COLUMNS
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ParameterError(f"ρ 必须 > 0, 实际 {rho}")

    capacity = capacity or shannon_capacity(w, tol=tol)
    e0_result = maximize_e0(rho, w, tol=tol)
    pi0_result = pi0_result or pi0(w)
    report = feedback_capacity_report(w, rho, tol=tol, capacity=capacity,
                                      e0_result=e0_result, pi0_result=pi0_result,
                                      curve=curve)
    forney_max = maximize_forney(rho, w,
                                 extra_starts=[e0_result.p_star, capacity.p_star])
    merged = merge_equivalent_outputs(w).channel
    merged_cutoff = maximize_e0(rho, merged, tol=tol).cutoff_rate

    rows: List[dict] = []

    def add(name: str, kind: str, target: str, value: float, p: Optional[Pmf] = None,
            residual: float = 0.0, tag: Optional[str] = None) -> int:
        rows.append({
            "name": name, "kind": kind, "target": target, "value_nats": value,
            "rho": float(rho), "p_vector": _fmt_p(p), "certificate_residual": residual,
            "tag": tag or name, "violation": False,
        })
        return len(rows) - 1

    add("shannon_c", "upper", "C", capacity.value, capacity.p_star, capacity.gap)
    add("cutoff_rate", "upper", "Calf", report.cutoff_rate, e0_result.p_star,
        e0_result.kkt_residual)
    add("ambiguous_bound", "upper", "Calf", report.ambiguous_bound)
    calf_upper_row = add("calf_upper", "upper", "Calf", report.calf_upper)
    add("merged_cutoff", "value", "Cal", merged_cutoff)
    add("neg_log_pi0", "lower", "Calf", report.neg_log_pi0, pi0_result.p_star,
        pi0_result.gap)
    add("feedback_lower_bound", "lower", "Calf", report.feedback_lower_bound)
    add("calf_lower", "lower", "Calf", report.calf_lower)
    add("ceo_feedback", "value", "Ceof", report.ceo_feedback)
    add("czero_feedback", "value", "Czerof", report.czero_feedback)
    add("forney_cal_rho_max", "lower", "Cal", forney_max.value, forney_max.p_used)

    named = {"e0_opt": e0_result.p_star, "capacity_opt": capacity.p_star,
             "pi0_opt": pi0_result.p_star}
    if forney_max.p_used is not None:
        named["forney_opt"] = forney_max.p_used
    violations: List[str] = []

    def flag(i: int, message: str) -> None:
        rows[i]["violation"] = True
        violations.append(message)

    for label, p in _shared_distributions(w, named, extra_p):
        f_ceo = forney_ceo_bound(p, w)
        f_cal = forney_cal_rho_bound(rho, p, w)
        cc_ceo, cc_cal = const_comp_bounds(rho, p, w, tol=tol)
        i_fceo = add(f"forney_ceo[{label}]", "lower", "Ceo", f_ceo, p, tag="forney_ceo")
        i_fcal = add(f"forney_cal_rho[{label}]", "lower", "Cal", f_cal, p,
                     tag="forney_cal_rho")
        i_cceo = add(f"const_comp_ceo[{label}]", "lower", "Ceo", cc_ceo.value, p,
                     cc_ceo.residual or 0.0, tag="const_comp_ceo")
        i_ccal = add(f"const_comp_cal[{label}]", "lower", "Cal", cc_cal.value, p,
                     cc_cal.residual or 0.0, tag="const_comp_cal")
        if f_cal > cc_cal.value + ORDER_TOL:
            flag(i_fcal, f"forney_cal_rho[{label}] {f_cal:.9g} > "
                         f"const_comp_cal {cc_cal.value:.9g}")
        if f_ceo > cc_ceo.value + ORDER_TOL:
            flag(i_fceo, f"forney_ceo[{label}] {f_ceo:.9g} > "
                         f"const_comp_ceo {cc_ceo.value:.9g}")
        # 常组分值是最小值的上估计，残差计入容限
        slack = ORDER_TOL + (cc_cal.residual or 0.0)
        for i, value in ((i_fceo, f_ceo), (i_cceo, cc_ceo.value), (i_fcal, f_cal),
                         (i_ccal, cc_cal.value)):
            if value > capacity.upper + slack:
                flag(i, f"{rows[i]['name']} {value:.9g} > "
                        f"shannon_c {capacity.value:.9g}")

    for i, row in enumerate(rows):
        if row["kind"] != "lower" or row["target"] not in ("Cal", "Calf"):
            continue
        slack = ORDER_TOL + row["certificate_residual"]
        if row["value_nats"] > report.calf_upper + slack:
            flag(i, f"{row['name']} {row['value_nats']:.9g} > "
                    f"calf_upper {report.calf_upper:.9g}")
    if report.ceo_feedback > capacity.upper + ORDER_TOL:
        violations.append(f"ceo_feedback {report.ceo_feedback:.9g} > shannon_c")

    for message in violations:
        logger.warning(f"界排序违例 (ρ={rho}): {message}")
    rows[calf_upper_row]["certificate_residual"] = e0_result.kkt_residual
    return ComparisonReport(table=pd.DataFrame(rows, columns=COLUMNS),
                            violations=violations)


def compare_random(seeds: int, rhos: Sequence[float] = (0.5, 1.0, 2.0),
                   shape: Tuple[int, int] = (3, 3), p_per_channel: int = 1,
                   zero_prob: float = 0.3) -> pd.DataFrame:
    """
    随机信道上的排序核对

    Args:
        seeds: 信道个数，种子为 0..seeds-1
        rhos: ρ 取值
        shape: 信道形状
        p_per_channel: 每个信道附加的随机输入分布个数
        zero_prob: 随机信道中结构零的比例

    Returns:
        DataFrame: 每个 (seed, ρ) 一行，列 seed, rho, rows, violations, messages

    每个信道一个任务：C、π0 与 E0 曲线缓存只算一次，ρ 在任务内按给定顺序依次处理，
    结果与线程数无关。
    """
    if seeds < 1:
        raise ParameterError(f"seeds 必须 ≥ 1, 实际 {seeds}")
    rho_values = [float(rho) for rho in rhos]
    if not rho_values:
        raise ParameterError("rhos 不能为空")

    def run(seed: int) -> List[dict]:
        w = random_channel(shape[0], shape[1], seed=seed, zero_prob=zero_prob)
        starts = dirichlet_starts(w.input_size, p_per_channel, seed=seed)
        extra = [Pmf(p) for p in starts]
        capacity = shannon_capacity(w)
        pi0_result = pi0(w)
        curve = E0Curve(w)
        rows = []
        for rho in rho_values:
            result = bound_comparison_report(rho, w, extra_p=extra, capacity=capacity,
                                             pi0_result=pi0_result, curve=curve)
            rows.append({"seed": seed, "rho": rho, "rows": len(result.table),
                         "violations": len(result.violations),
                         "messages": "; ".join(result.violations)})
        return rows

    per_seed = run_tasks(run, list(range(seeds)))
    table = pd.DataFrame([row for rows in per_seed for row in rows],
                         columns=["seed", "rho", "rows", "violations", "messages"])
    total = int(table["violations"].sum())
    logger.info(f"随机核对完成: {seeds} 个信道 × {len(rho_values)} 个 ρ, 违例 {total}")
    return table
