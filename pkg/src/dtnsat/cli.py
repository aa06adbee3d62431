"""Command line front end: run one scenario, run a batch, analyze logs."""

from __future__ import annotations

import argparse
import sys

from . import analysis, engine


def _cmd_run(args) -> int:
    configs, swept = engine.load_config(args.config)
    if len(configs) > 1:
        keys = ", ".join(swept)
        print(f"error: config expands to {len(configs)} runs (swept: {keys}); "
              f"use 'batch' for sweeps", file=sys.stderr)
        return 2
    config = configs[0]
    if args.seed is not None:
        config = config.with_seed(args.seed)
    result = engine.run(config, args.out)
    print(f"wrote {result.events_path}")
    print(f"wrote {result.occupancy_path}")
    print(f"wrote {result.manifest_path}")
    return 0


def _cmd_batch(args) -> int:
    index_path = engine.batch(args.config, args.out, jobs=args.jobs,
                              base_seed=args.seed)
    print(f"wrote {index_path}")
    return 0


def _cmd_analyze(args) -> int:
    runs = analysis.discover_runs(args.logs, total_nodes=args.nodes)
    if not runs:
        print("error: no completed runs found", file=sys.stderr)
        return 2
    paths = analysis.summarize(runs, args.out, alpha=args.alpha)
    for path in paths.values():
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtnsat",
        description="Discrete-event simulator for message spread in sparse "
                    "mobile ad hoc networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single scenario")
    p_run.add_argument("--config", required=True, help="scenario config file")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config's random seed")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_batch = sub.add_parser("batch", help="run a config sweep")
    p_batch.add_argument("--config", required=True, help="scenario config file")
    p_batch.add_argument("--jobs", type=int, default=1,
                         help="parallel worker processes")
    p_batch.add_argument("--out", default="out", help="output directory")
    p_batch.add_argument("--seed", type=int, default=None,
                         help="base seed; run i uses base + i")
    p_batch.set_defaults(func=_cmd_batch)

    p_an = sub.add_parser("analyze", help="summarize finished runs")
    p_an.add_argument("--logs", required=True,
                      help="a run directory or a batch output directory")
    p_an.add_argument("--nodes", type=int, default=None,
                      help="total node count (default: from each manifest)")
    p_an.add_argument("--out", required=True, help="directory for summary tables")
    p_an.add_argument("--alpha", type=float, default=0.1,
                      help="smoothing factor for the saturation-time average")
    p_an.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (engine.ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
