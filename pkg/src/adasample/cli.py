"""Command-line entry point.

    adasample run <config> [--seed N] [--out DIR]
    adasample compare <configA> <configB> [...] --seeds s1,s2,... [--out DIR]
    adasample report <run_dir> [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 data error, 3 training
divergence, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import engine, runio
from .config import parse_config
from .errors import ConfigError, DataError, DivergenceError
from .report import write_report

__all__ = ["main", "entry"]

EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_DIVERGENCE = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adasample",
        description="Difficulty-driven adaptive sampling of synthesized training data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one training run")
    p_run.add_argument("config", help="path to a key = value config file")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default=None, help="output directory")

    p_cmp = sub.add_parser("compare", help="run several configs over shared seeds")
    p_cmp.add_argument("configs", nargs="+", help="two or more config files")
    p_cmp.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_cmp.add_argument("--out", default=None, help="output directory")

    p_rep = sub.add_parser("report", help="render report files for a finished run")
    p_rep.add_argument("run_dir", help="directory holding a complete run output set")
    p_rep.add_argument("--out", default=None, help="directory for the report files")
    return parser


def cmd_run(args) -> int:
    cfg = parse_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seeds[0]
    out_dir = Path(args.out or cfg.out or f"runs/{cfg.experiment}")
    tick = time.perf_counter()
    report = engine.run(cfg.to_loop(seed))
    elapsed = time.perf_counter() - tick
    runio.persist_run(report, cfg.snapshot(), out_dir)
    print(
        f"run {cfg.experiment} mode={report.mode} seed={seed} "
        f"epochs={len(report.records)} final_val_error={report.final_val_error:.6f} "
        f"elapsed={elapsed:.1f}s out={out_dir}"
    )
    return 0


def cmd_compare(args) -> int:
    if len(args.configs) < 2:
        raise ConfigError("compare needs at least two config files")
    configs = [parse_config(path) for path in args.configs]
    if args.seeds:
        try:
            seeds = [int(tok) for tok in args.seeds.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --seeds list: {exc}") from exc
    else:
        seeds = list(configs[0].seeds)
    if len(seeds) < 2:
        raise ConfigError("compare needs at least two seeds")
    if len(set(seeds)) != len(seeds):
        raise ConfigError(f"seeds must be distinct, got {seeds}")
    out_dir = Path(args.out or "compare")
    tick = time.perf_counter()
    report = engine.compare(configs, seeds)
    elapsed = time.perf_counter() - tick
    runio.persist_compare(report, out_dir)
    for label in report.labels:
        print(f"{label}: {report.means[label]:.6f} +/- {report.stds[label]:.6f}")
    for cell in report.pairwise:
        if "p" in cell:
            print(f"{cell['a']} vs {cell['b']}: t={cell['t']:.4f} p={cell['p']:.6g}")
        else:
            reason = cell.get("degenerate") or cell.get("skipped")
            print(f"{cell['a']} vs {cell['b']}: {reason}")
    print(f"compare done in {elapsed:.1f}s out={out_dir}")
    return 0


def cmd_report(args) -> int:
    paths = write_report(args.run_dir, args.out)
    print(f"report: wrote {', '.join(p.name for p in paths)} to {Path(paths[0]).parent}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        return cmd_report(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as exc:
        n = len(getattr(exc, "records", ()))
        print(f"divergence: {exc} ({n} completed epochs)", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
