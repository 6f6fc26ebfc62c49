"""Command line entry point: ``div2vec <subcommand> --config cfg.yaml --out-dir runs/x``.

Exit codes: 0 success, 1 usage or configuration error, 2 stage failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .pipeline import ConfigError, Experiment, ExperimentConfig, StageError, run_figure2, run_pipeline

SUBCOMMANDS = ("ingest", "walk", "embed", "edges", "fit", "evaluate", "figure2", "report", "run",
               "synthesize", "init-config")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config (YAML)")
    common.add_argument("--out-dir", type=Path, default=Path("runs/default"))
    common.add_argument("--seed", type=int, help="override every per-stage seed")
    common.add_argument("--threads", type=int, help="numba worker threads")
    common.add_argument("--force", action="store_true", help="recompute cached stages")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="div2vec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "synthesize":
            p.add_argument("--dataset-seed", type=int, default=0)
    return parser


def _load_config(args) -> ExperimentConfig:
    if args.config is None:
        raise ConfigError("--config is required")
    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        cfg = cfg.with_seed(args.seed)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads is not None:
            import numba

            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))

        if args.command == "init-config":
            text = ExperimentConfig().dump()
            if args.config:
                args.config.write_text(text)
            else:
                sys.stdout.write(text)
            return 0
        if args.command == "synthesize":
            from .datasets import write_synthetic_movielens

            r, g = write_synthetic_movielens(args.out_dir, args.dataset_seed)
            print(r)
            print(g)
            return 0

        cfg = _load_config(args)
        base = args.config.resolve().parent
        if args.command == "run":
            reports = run_pipeline(cfg, args.out_dir, args.force, base)
            print(args.out_dir / "reports" / "metrics.csv")
            for r in reports:
                print(f"{r.method:>16s} {r.operator:>12s} auc={r.auc:.4f}")
            return 0
        if args.command == "figure2":
            for name, rho in run_figure2(cfg, args.out_dir, args.force, base).items():
                print(f"{name}: spearman={rho:.4f}")
            return 0
        exp = Experiment(cfg, args.out_dir, args.force, base)
        with exp.session():
            getattr(exp, args.command)()
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
