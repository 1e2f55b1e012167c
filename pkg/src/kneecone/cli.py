"""Command-line front end for the batch experiment harness.

Subcommands:
    run           execute an experiment config and build the comparison tables
    summarize     rebuild the tables from an existing artifact directory
    plotdata      emit plot-ready tables and render the figures
    gen-scenario  write a generated mission scenario file
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from kneecone.experiment import (
    ExperimentConfig,
    emit_plot_data,
    run_experiment,
    summarize_artifacts,
)
from kneecone.problems import MISSION_SPECS, generate_scenario, save_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kneecone",
        description="Knee-point multi-objective optimization experiment harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True, help="experiment config (JSON)")
    p_run.add_argument("--out", required=True, help="artifact output directory")
    p_run.add_argument("--reps", type=int, default=None, help="override repetitions")
    p_run.add_argument("--seed", type=int, default=None, help="override base seed")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    p_sum = sub.add_parser("summarize", help="recompute tables from artifacts")
    p_sum.add_argument("--out", required=True, help="artifact directory")

    p_plot = sub.add_parser("plotdata", help="emit plot tables and figures")
    p_plot.add_argument("--out", required=True, help="artifact directory")

    p_gen = sub.add_parser("gen-scenario", help="emit a mission scenario file")
    p_gen.add_argument(
        "--mission", type=int, required=True, help=f"mission id (1-{len(MISSION_SPECS)})"
    )
    p_gen.add_argument("--seed", type=int, default=0, help="scenario generation seed")
    p_gen.add_argument("--out", required=True, help="scenario output file")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.reps is not None:
        cfg = replace(cfg, repetitions=args.reps)
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)

    def progress(done):
        vid, rep = done
        print(f"finished {vid} rep {rep}", file=sys.stderr)

    out = run_experiment(cfg, args.out, jobs=args.jobs, progress=progress)
    print(f"artifacts written to {out}")
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    out = summarize_artifacts(args.out)
    print(f"tables rebuilt under {out}")
    return 0


def _cmd_plotdata(args: argparse.Namespace) -> int:
    from kneecone.plots import render_figures

    plot_dir = emit_plot_data(args.out)
    figures = render_figures(args.out)
    print(f"plot tables under {plot_dir}")
    for fig in figures:
        print(f"rendered {fig}")
    return 0


def _cmd_gen_scenario(args: argparse.Namespace) -> int:
    if args.mission not in MISSION_SPECS:
        raise ValueError(f"unknown mission id {args.mission}")
    scenario = generate_scenario(MISSION_SPECS[args.mission], seed=args.seed)
    save_scenario(scenario, args.out)
    print(f"scenario written to {args.out}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "summarize": _cmd_summarize,
    "plotdata": _cmd_plotdata,
    "gen-scenario": _cmd_gen_scenario,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
