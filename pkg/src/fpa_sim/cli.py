"""``fpa-sim`` command line.

    fpa-sim run      --program P [--config C] [--mode push|fetch] [--report R] [--trace T] [--quiet]
    fpa-sim compare  --program P [--config C] [--report R] [--trace T] [--quiet]
    fpa-sim validate --program P [--config C] [--quiet]

Exit status: 0 on success, 1 for unreadable or invalid input, 2 when the
simulation itself breaks an internal invariant.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, SimulationConfig, load_config
from .engine import NoFpuForKind, SimulationError, compare, run, run_fetch_baseline
from .funpiler import InvalidTransition
from .program import ProgramError, critical_path_length, parse_program
from .scheduler import SchedulerError
from .stats import write_report
from .trace import write_trace


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpa-sim", description="Functional processor farm simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, outputs=True):
        p.add_argument("--program", required=True, help="program file")
        p.add_argument("--config", help="key = value configuration file")
        if outputs:
            p.add_argument("--report", help="write the JSON report here")
            p.add_argument("--trace", help="write the CSV trace here")
        p.add_argument("--quiet", action="store_true", help="suppress the summary")

    p_run = sub.add_parser("run", help="simulate one mode")
    common(p_run)
    p_run.add_argument("--mode", choices=("push", "fetch"), help="override the configured mode")
    common(sub.add_parser("compare", help="simulate push and fetch and report both"))
    common(sub.add_parser("validate", help="parse the program and configuration only"), outputs=False)
    return parser


def _mode_path(path: str, mode: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}.{mode}{ext or '.csv'}"


def _summary(report: dict) -> str:
    lines = [f"mode        {report['mode']}", f"makespan    {report['makespan']} cycles"]
    lines.append(f"throughput  {report['throughput']:.4f} functions/cycle")
    util = " ".join(f"{u:.2f}" for u in report["per_fpu_utilization"])
    lines.append(f"utilization {util}")
    lines.append(f"peak        {report['peak_parallelism']} functions running")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    err = sys.stderr

    try:
        config = load_config(args.config) if args.config else SimulationConfig()
    except ConfigError as exc:
        print(f"fpa-sim: config error: {exc}", file=err)
        return 1
    try:
        with open(args.program, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"fpa-sim: cannot open {args.program}: {exc.strerror}", file=err)
        return 1
    try:
        graph = parse_program(text, config.priority_levels)
    except ProgramError as exc:
        print(f"fpa-sim: {args.program}: {exc}", file=err)
        return 1

    if args.command == "validate":
        if not args.quiet:
            print(f"ok: {len(graph)} functions, {len(graph.edges)} edges, critical path {critical_path_length(graph)} cycles")
        return 0

    mode = "compare" if args.command == "compare" else (args.mode or config.mode)
    try:
        if mode == "compare":
            report, push_trace, fetch_trace = compare(graph, config)
            traces = {"push": push_trace, "fetch": fetch_trace}
        else:
            stats, trace = (run if mode == "push" else run_fetch_baseline)(graph, config)
            report = stats.to_report()
            traces = {mode: trace}
    except (NoFpuForKind, ProgramError) as exc:
        print(f"fpa-sim: {exc}", file=err)
        return 1
    except (SimulationError, SchedulerError, InvalidTransition) as exc:
        print(f"fpa-sim: internal simulation failure: {exc}", file=err)
        return 2

    try:
        if args.report:
            write_report(report, args.report)
        if args.trace:
            if len(traces) == 1:
                write_trace(traces[mode], args.trace)
            else:
                for m, t in traces.items():
                    write_trace(t, _mode_path(args.trace, m))
    except OSError as exc:
        print(f"fpa-sim: cannot write output: {exc}", file=err)
        return 1

    if not args.quiet:
        if mode == "compare":
            print(_summary(report["push"]))
            print()
            print(_summary(report["fetch"]))
            ratio = report["ratio"]
            print()
            print(f"fetch/push  {ratio:.3f}" if ratio is not None else "fetch/push  n/a")
        else:
            print(_summary(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
