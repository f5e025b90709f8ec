"""Command-line entry point: ``venuerank {synth,train,rank,eval,cv}``.

Exit status is 0 on success, 1 on a usage or configuration error and 2 on a
data error.  Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Optional, Sequence

from . import pipeline
from .config import ConfigError, TrainConfig, apply_overrides, read_overrides
from .dataset import load_bundle_dir, parse_qrel, read_jsonl, write_bundle, write_jsonl
from .errors import VenueRankError
from .evaluation import QrelSet
from .persistence import load_models, save_models
from .synth import SynthConfig, generate_synthetic

logger = logging.getLogger("venuerank")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
RUN_FILE = "run.tsv"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed for all randomness")
    common.add_argument("--config", type=Path, help="file of key=value overrides")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="venuerank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="{synth,train,rank,eval,cv}",
                                parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("synth", parents=[common], help="write a synthetic JSONL dataset")
    p.set_defaults(handler=cmd_synth, parser=p)

    p = sub.add_parser("train", parents=[common], help="train and save per-user and ranker models")
    p.add_argument("--data", type=Path, required=True, help="dataset directory")
    p.set_defaults(handler=cmd_train, parser=p)

    p = sub.add_parser("rank", parents=[common], help="rank request candidates into a run file")
    p.add_argument("--data", type=Path, required=True, help="dataset directory")
    p.add_argument("--models", type=Path, required=True, help="directory written by train")
    p.set_defaults(handler=cmd_rank, parser=p)

    p = sub.add_parser("eval", parents=[common], help="score a run file against qrels")
    p.add_argument("--run", type=Path, required=True, help="run file written by rank")
    p.add_argument("--qrels", type=Path, required=True, help="qrels.jsonl")
    p.set_defaults(handler=cmd_eval, parser=p)

    p = sub.add_parser("cv", parents=[common], help="k-fold cross-validation on a dataset")
    p.add_argument("--data", type=Path, required=True, help="dataset directory")
    p.set_defaults(handler=cmd_cv, parser=p)
    return parser


def _overrides(args) -> dict[str, str]:
    if args.config is None:
        return {}
    try:
        overrides = read_overrides(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    known = {f.name for f in fields(TrainConfig)} | {f.name for f in fields(SynthConfig)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return overrides


def _train_config(args) -> TrainConfig:
    return apply_overrides(TrainConfig(), _overrides(args), strict=False)


def _require_out(args) -> Path:
    if args.out is None:
        args.parser.error("the following arguments are required: --out")
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _emit(records, out: Optional[Path], name: str) -> None:
    for rec in records:
        print(json.dumps(rec))
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_jsonl(out / name, records)


def cmd_synth(args) -> int:
    out = _require_out(args)
    overrides = {k: v for k, v in _overrides(args).items() if k != "seed"}
    try:
        config = apply_overrides(SynthConfig(seed=args.seed), overrides, strict=False)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    bundle, _ = generate_synthetic(config)
    write_bundle(bundle, out)
    logger.info("wrote %d venues, %d users to %s", len(bundle.venues), len(bundle.histories), out)
    return EXIT_OK


def cmd_train(args) -> int:
    out = _require_out(args)
    config = _train_config(args)
    bundle = load_bundle_dir(args.data)
    user_models, ranker = pipeline.train(bundle, config, args.seed)
    save_models(out, {u: m.review_models for u, m in user_models.items()}, ranker)
    return EXIT_OK


def cmd_rank(args) -> int:
    out = _require_out(args)
    config = _train_config(args)
    bundle = load_bundle_dir(args.data)
    review_models, ranker = load_models(args.models)
    user_models = pipeline.user_models_from_saved(bundle, review_models)
    ranked = pipeline.rank(bundle, user_models, ranker)
    pipeline.write_run(out / RUN_FILE, ranked, config.run_tag)
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _train_config(args)
    qrels = QrelSet(dict(read_jsonl(args.qrels, parse_qrel)))
    rankings = pipeline.read_run(args.run)
    _emit(pipeline.evaluate_run(rankings, qrels, config.cutoff), args.out, "metrics.jsonl")
    return EXIT_OK


def cmd_cv(args) -> int:
    config = _train_config(args)
    bundle = load_bundle_dir(args.data)
    report = pipeline.cross_validate_bundle(bundle, config, args.seed)
    _emit(report.records(), args.out, "cv.jsonl")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        return args.handler(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"venuerank: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (VenueRankError, OSError) as exc:
        print(f"venuerank: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
