#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
caplab 命令行工具

信道参数可以是 JSON 文件路径，也可以是内置信道描述，如 fig1:eps=0.01。
退出码：0 成功，1 界排序违例，2 参数/输入错误，3 未收敛（报告照常写出）。
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from caplab.config_manager import get_config, load_config, set_config
from caplab.errors import ConvergenceError, ParameterError
from caplab.reporting import SIMULATION_COLUMNS, Report, render_frame
from caplab.channel import (
    CHANNELS,
    Dmc,
    Pmf,
    channel_graph,
    check_factorization,
    dump_channel,
    load_channel_file,
    merge_equivalent_outputs,
    parse_channel_string,
    q_star,
)
from caplab.gallager import e0, maximize_e0
from caplab.capacity import (
    binary_input_exact,
    feedback_capacity_report,
    min_capacity_subchannels,
    pi0,
    shannon_capacity,
)
from caplab.bounds import (
    bound_comparison_report,
    E0Curve,
    compare_random,
    feedback_lower_bound,
    n_letter_forney,
    r_star,
)
from caplab.listsim import (
    binomial_moment_bound,
    binomial_moment_oracle,
    exact_moments,
    load_code_file,
    mc_moments,
    simulate_thm4_scheme,
    simulate_type_scheme,
)

logger = logging.getLogger("caplab.cli")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2
EXIT_UNCONVERGED = 3


def setup_logging(log_level: str = "WARNING", log_file: Optional[str] = None) -> None:
    """设置日志"""
    handlers = [logging.StreamHandler()]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def resolve_channel(text: str) -> Dmc:
    """JSON 文件路径或内置信道描述"""
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        return load_channel_file(path)
    name = text.partition(":")[0]
    if name not in CHANNELS:
        raise ParameterError(f"既不是信道文件也不是内置信道: {text}. 内置: {list(CHANNELS)}")
    return parse_channel_string(text)


def parse_pmf(text: Optional[str]) -> Optional[Pmf]:
    if not text:
        return None
    try:
        values = [float(v) for v in text.replace(",", " ").split()]
    except ValueError as e:
        raise ParameterError(f"无法解析输入分布: {text!r}") from e
    return Pmf(np.array(values))


def require(args: argparse.Namespace, *names: str) -> None:
    """子命令必需的参数"""
    missing = [f"--{n.replace('_', '-')}" for n in names
               if getattr(args, n, None) is None]
    if missing:
        raise ParameterError(f"{args.command} 需要参数: {', '.join(missing)}")


def emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"报告已写入 {output}")
    else:
        sys.stdout.write(text)


def write_report(report: Report, args: argparse.Namespace) -> int:
    emit(report.render(fmt=args.format, header=False if args.no_header else None,
                       bits=True if args.bits else None), args.output)
    return EXIT_OK if report.converged else EXIT_UNCONVERGED


def write_frame(frame: pd.DataFrame, args: argparse.Namespace,
                rate_columns: Sequence[str] = (), status: int = EXIT_OK) -> int:
    emit(render_frame(frame, fmt=args.format, command=args.command,
                      header=False if args.no_header else None,
                      bits=True if args.bits else None,
                      rate_columns=rate_columns), args.output)
    return status


# ========== 子命令 ==========
def capacity_command(args: argparse.Namespace) -> int:
    """Shannon 容量"""
    w = resolve_channel(args.channel)
    result = shannon_capacity(w, tol=args.tol)
    report = Report("capacity", converged=result.converged)
    report.add("shannon_c", result.value, kind="value", p=result.p_star,
               residual=result.gap)
    report.add("shannon_c_upper", result.upper, kind="upper", tag="shannon_c")
    if args.subchannels:
        sub = min_capacity_subchannels(w)
        report.add("min_subchannel_capacity", sub.value, kind="upper", residual=sub.gap)
        report.add("neg_log_pi0", sub.neg_log_pi0, kind="lower")
        report.converged = report.converged and sub.converged
    return write_report(report, args)


def e0_command(args: argparse.Namespace) -> int:
    """E0(ρ,P) 或 max_P E0(ρ,P)"""
    require(args, "rho")
    w = resolve_channel(args.channel)
    p = parse_pmf(args.p)
    report = Report("e0")
    if p is not None:
        report.add("e0", e0(args.rho, p, w), rho=args.rho, p=p, tag="gallager_e0")
    else:
        result = maximize_e0(args.rho, w, tol=args.tol)
        report.converged = result.converged
        report.add("e0_max", result.e0_value, kind="value", rho=args.rho,
                   p=result.p_star, residual=result.kkt_residual, tag="gallager_e0")
    return write_report(report, args)


def cutoff_command(args: argparse.Namespace) -> int:
    """max_P E0(ρ,P)/ρ"""
    require(args, "rho")
    w = resolve_channel(args.channel)
    result = maximize_e0(args.rho, w, tol=args.tol)
    report = Report("cutoff", converged=result.converged)
    report.add("cutoff_rate", result.cutoff_rate, rho=args.rho, p=result.p_star,
               residual=result.kkt_residual)
    return write_report(report, args)


def pi0_command(args: argparse.Namespace) -> int:
    """π0 线性规划"""
    w = resolve_channel(args.channel)
    result = pi0(w)
    report = Report("pi0")
    report.add("pi0", result.value, kind="value", p=result.p_star, residual=result.gap,
               rate=False)
    report.add("neg_log_pi0", result.neg_log_value, kind="value", p=result.p_star,
               residual=result.gap, tag="czero_feedback")
    report.add("pi0_dual_bound", result.dual_bound, kind="lower", tag="pi0", rate=False)
    return write_report(report, args)


def report_command(args: argparse.Namespace) -> int:
    """带反馈容量汇总"""
    require(args, "rho")
    w = resolve_channel(args.channel)
    result = feedback_capacity_report(w, args.rho, tol=args.tol)
    report = Report("report", converged=result.converged)
    rho = args.rho
    report.add("shannon_c", result.shannon_c, residual=result.capacity_gap)
    report.add("pi0", result.pi0, rate=False)
    report.add("neg_log_pi0", result.neg_log_pi0, kind="lower")
    report.add("czero_positive", float(result.czero_positive), tag="czero_positive",
               rate=False)
    report.add("czero_feedback", result.czero_feedback)
    report.add("ceo_positive", float(result.ceo_positive), tag="ceo_positive",
               rate=False)
    report.add("ceo_feedback", result.ceo_feedback)
    report.add("cutoff_rate", result.cutoff_rate, kind="upper", rho=rho,
               residual=result.kkt_residual)
    report.add("ambiguous_bound", result.ambiguous_bound, kind="upper", rho=rho)
    report.add("calf_upper", result.calf_upper, kind="upper", rho=rho)
    if result.calf_exact is not None:
        report.add("calf_exact", result.calf_exact, rho=rho)
    report.add("feedback_lower_bound", result.feedback_lower_bound, kind="lower",
               rho=rho)
    report.add("calf_lower", result.calf_lower, kind="lower", rho=rho)
    return write_report(report, args)


def bounds_command(args: argparse.Namespace) -> int:
    """全部界的排序核对"""
    require(args, "rho")
    w = resolve_channel(args.channel)
    result = bound_comparison_report(args.rho, w, tol=args.tol)
    status = EXIT_OK if result.ok else EXIT_VIOLATION
    return write_frame(result.table, args, rate_columns=["value_nats"], status=status)


def reduce_command(args: argparse.Namespace) -> int:
    """合并同支撑输出，输出化简后的信道 JSON"""
    w = resolve_channel(args.channel)
    merged = merge_equivalent_outputs(w)
    reduced = merged.channel
    graph = channel_graph(reduced)
    logger.info(f"合并组 {merged.groups}, 无环 {graph.acyclic}, "
                f"可分解 {check_factorization(reduced) is not None}")
    if w.input_size == 2 and args.rho is not None:
        exact = binary_input_exact(w, args.rho, tol=args.tol)
        logger.info(f"二输入精确值: Cal = {exact.cal:.12g}, Ceo = {exact.ceo:.12g}")
    emit(dump_channel(reduced), args.output)
    return EXIT_OK


def nletter_command(args: argparse.Namespace) -> int:
    """n 字母 Forney 界"""
    require(args, "rho", "n")
    w = resolve_channel(args.channel)
    bound = n_letter_forney(args.rho, w, args.n, mode=args.mode, p1=parse_pmf(args.p))
    report = Report("nletter")
    report.add(bound.name, bound.value, kind=bound.kind.value, rho=args.rho,
               tag="forney_cal_rho_multi")
    return write_report(report, args)


def rstar_command(args: argparse.Namespace) -> int:
    """R*(ρ) 与反馈下界"""
    require(args, "rho")
    w = resolve_channel(args.channel)
    curve = E0Curve(w)
    rs = r_star(args.rho, w, xi_max=args.xi_max, curve=curve)
    fb = feedback_lower_bound(args.rho, w, xi_max=args.xi_max, curve=curve)
    qs = q_star(w)
    report = Report("rstar")
    report.add("r_star", rs.value, kind="lower", rho=args.rho, p=rs.p_star)
    report.add("xi_star", rs.xi, rho=args.rho, tag="r_star", rate=False)
    report.add("q_star", qs.value, tag="q_star", rate=False)
    report.add("feedback_lower_bound", fb.value, kind="lower", rho=args.rho)
    return write_report(report, args)


def simulate_command(args: argparse.Namespace) -> int:
    """方案仿真与码本的列表矩"""
    require(args, "rho")
    w = resolve_channel(args.channel)
    if args.scheme == "moments":
        require(args, "code")
        code = load_code_file(args.code)
        report = Report("simulate")
        if w.output_size ** code.n <= get_config().limits.enumeration_cap:
            exact = exact_moments(code, args.rho, w)
            names = ("list_moment", "cutoff_moment", "erasure_prob", "ml_error_prob")
            for name in names:
                report.add(name, getattr(exact, name), rho=args.rho,
                           tag=f"{name}_exact", rate=False)
        if args.trials:
            mc = mc_moments(code, args.rho, w, args.trials, args.seed)
            report.add("list_moment", mc.list_moment, rho=args.rho,
                       residual=mc.list_std_error, tag="list_moment_mc", rate=False)
            report.add("cutoff_moment", mc.cutoff_moment, rho=args.rho,
                       residual=mc.cutoff_std_error, tag="cutoff_moment_mc", rate=False)
        return write_report(report, args)

    require(args, "rate", "n", "trials")
    if args.scheme == "thm4":
        result = simulate_thm4_scheme(w, args.rho, args.rate, args.n, args.ell, args.k,
                                      args.nprime, args.trials, args.seed,
                                      p=parse_pmf(args.p))
        frame = pd.DataFrame([result.to_row()], columns=SIMULATION_COLUMNS)
    else:
        require(args, "alpha")
        result = simulate_type_scheme(w, args.rho, args.rate, args.n, args.alpha,
                                      args.trials, args.seed, p=parse_pmf(args.p))
        row = result.to_row()
        row.update({"exact_moment": result.exact_moment,
                    "partition_bound": result.partition_bound,
                    "relaxed_bound": result.relaxed_bound})
        frame = pd.DataFrame([row])
    return write_frame(frame, args, rate_columns=["R_eff"])


def binomial_command(args: argparse.Namespace) -> int:
    """二项矩界与精确值"""
    require(args, "rho", "n", "alpha", "beta")
    bound = binomial_moment_bound(args.n, args.alpha, args.beta, args.rho, args.variant)
    report = Report("binomial")
    report.add(f"binomial_bound_{args.variant}", bound, kind="upper", rho=args.rho,
               tag="binomial_moment_bound", rate=False)
    cap = get_config().limits.binomial_oracle_cap
    if args.n * args.alpha <= math.log(cap):
        count = int(round(math.exp(args.n * args.alpha)))
        exact = binomial_moment_oracle(count, math.exp(-args.n * args.beta), args.rho,
                                       shifted=args.variant == "shifted")
        report.add(f"binomial_exact_{args.variant}", exact, rho=args.rho,
                   tag="binomial_moment_oracle", rate=False)
    else:
        logger.info(f"e^{{nα}} 超过精确求和上限 {cap}，只输出上界")
    return write_report(report, args)


def compare_command(args: argparse.Namespace) -> int:
    """随机信道或指定信道上的排序核对"""
    if args.channel == "random":
        rhos = [args.rho] if args.rho is not None else [0.5, 1.0, 2.0]
        table = compare_random(args.seeds, rhos=rhos, p_per_channel=args.p_count)
        status = EXIT_OK if int(table["violations"].sum()) == 0 else EXIT_VIOLATION
        return write_frame(table, args, status=status)
    return bounds_command(args)


COMMANDS = {
    "capacity": capacity_command,
    "e0": e0_command,
    "cutoff": cutoff_command,
    "pi0": pi0_command,
    "report": report_command,
    "bounds": bounds_command,
    "reduce": reduce_command,
    "nletter": nletter_command,
    "rstar": rstar_command,
    "simulate": simulate_command,
    "binomial": binomial_command,
    "compare": compare_command,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="caplab 信道容量与列表译码工具")
    parser.add_argument("--config", help="YAML 配置文件")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="日志级别")
    parser.add_argument("--log-file", help="日志文件")
    subparsers = parser.add_subparsers(dest="command", help="可用命令")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rho", type=float, help="ρ")
    common.add_argument("--tol", type=float, default=None, help="求解容限，默认 1e-9")
    common.add_argument("--output", "-o", help="输出文件，默认标准输出")
    common.add_argument("--format", choices=["csv", "text"], default="csv", help="输出格式")
    common.add_argument("--bits", action="store_true", help="以 bits 输出")
    common.add_argument("--no-header", action="store_true", help="不输出时间戳首行")
    common.add_argument("--p", help="输入分布，如 \"0.5 0.5\"")

    channel_help = "信道 JSON 文件或内置信道，如 fig1:eps=0.01"
    for name in ("capacity", "e0", "cutoff", "pi0", "report", "bounds", "reduce",
                 "nletter", "rstar"):
        sub = subparsers.add_parser(name, parents=[common], help=COMMANDS[name].__doc__)
        sub.add_argument("channel", help=channel_help)
        if name == "capacity":
            sub.add_argument("--subchannels", action="store_true", help="同时计算 min C(V)")
        if name == "nletter":
            sub.add_argument("--n", type=int, help="分组长度")
            sub.add_argument("--mode", choices=["exhaustive-uniform", "product"],
                             default="exhaustive-uniform", help="分布族")
        if name == "rstar":
            sub.add_argument("--xi-max", type=float, default=None, help="ξ 上限，默认 1e3")

    sim = subparsers.add_parser("simulate", parents=[common],
                                help=COMMANDS["simulate"].__doc__)
    sim.add_argument("channel", help=channel_help)
    sim.add_argument("--scheme", choices=["thm4", "type", "moments"], default="thm4",
                     help="三阶段方案、型方案或给定码本的列表矩")
    sim.add_argument("--code", help="码本或反馈策略文件（moments）")
    sim.add_argument("--rate", type=float, help="第一阶段速率（nats）")
    sim.add_argument("--n", type=int, help="分组长度")
    sim.add_argument("--trials", type=int, help="试验次数")
    sim.add_argument("--seed", type=int, default=0, help="随机种子")
    sim.add_argument("--ell", type=int, default=4, help="列表长度 ℓ")
    sim.add_argument("--k", type=int, default=1, help="第三阶段重复次数")
    sim.add_argument("--nprime", type=int, default=1, help="第二阶段重复次数 n'")
    sim.add_argument("--alpha", type=float, help="型方案的 α")

    binom_parser = subparsers.add_parser("binomial", parents=[common],
                                         help=COMMANDS["binomial"].__doc__)
    binom_parser.add_argument("--n", type=int, help="n")
    binom_parser.add_argument("--alpha", type=float, help="变量个数 e^{nα}")
    binom_parser.add_argument("--beta", type=float, help="成功概率 e^{-nβ}")
    binom_parser.add_argument("--variant", choices=["shifted", "raw"],
                              default="shifted")

    cmp_parser = subparsers.add_parser("compare", parents=[common],
                                       help=COMMANDS["compare"].__doc__)
    cmp_parser.add_argument("channel", help="random 或信道")
    cmp_parser.add_argument("--seeds", type=int, default=100, help="随机信道个数")
    cmp_parser.add_argument("--p-count", type=int, default=5, help="每个信道的随机输入分布个数")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_INVALID

    setup_logging(args.log_level, args.log_file)
    try:
        if args.config:
            set_config(load_config(args.config))
        return COMMANDS[args.command](args)
    except ConvergenceError as e:
        logger.error(f"未收敛: {e} (残差 {e.residual})")
        return EXIT_UNCONVERGED
    except (ValueError, FileNotFoundError) as e:
        logger.error(f"{args.command} 失败: {e}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
