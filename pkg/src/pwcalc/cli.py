"""Command line entry point.

    pwcalc <experiment> [--config file.json] [--seed N] [--out DIR]
                        [--strict-mc] [--oracle]

Without --config the experiment runs with its preset configuration.
Exit status is nonzero when any pathwise check fails; --strict-mc
promotes statistical warnings to failures as well.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .harness import EXPERIMENTS, ExperimentConfig, default_config, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwcalc",
        description="pathwise stochastic calculus experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="JSON config file; preset used if omitted")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output directory for report and tables")
        p.add_argument(
            "--strict-mc",
            action="store_true",
            help="treat statistical warnings as failures",
        )
        p.add_argument(
            "--oracle",
            action="store_true",
            help="enable brute-force cross-checks",
        )
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_json_dict(json.load(fh))
        if cfg.experiment != args.experiment:
            raise SystemExit(
                f"config is for {cfg.experiment!r}, command line says {args.experiment!r}"
            )
    else:
        cfg = default_config(args.experiment)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
        updates["generator"] = dataclasses.replace(cfg.generator, seed=args.seed)
    if args.out is not None:
        updates["output_dir"] = args.out
    if args.strict_mc:
        updates["strict_mc"] = True
    if args.oracle:
        updates["oracle"] = True
    return dataclasses.replace(cfg, **updates) if updates else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args)
    report = run(cfg)
    for c in report.checks:
        status = "PASS" if c.passed else ("FAIL" if c.kind == "pathwise" else "WARN")
        if not c.passed and cfg.strict_mc:
            status = "FAIL"
        print(f"[{status}] {c.kind:11s} {c.name}")
    bad = not report.pathwise_ok or (cfg.strict_mc and not report.all_ok)
    if cfg.output_dir:
        print(f"report written to {cfg.output_dir}/report.json")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
