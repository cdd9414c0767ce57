"""``rainbc`` command line: synth, fit, apply, evaluate and run.

Exit status is 0 when at least one station succeeds, 1 when every station
fails and 2 for configuration or input problems. Progress goes to standard
error; standard output carries a single summary line.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .evaluation import (
    PipelineError,
    apply_models,
    evaluate_corrected,
    fit_models,
    run_pipeline,
)
from .ingest import IngestError
from .models import ModelFileError
from .synth import synth_generate

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config value (repeatable)")
    common.add_argument("--seed", type=int, help="master random seed")
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true", help="log every work unit")
    common.add_argument("-q", "--quiet", action="store_true", help="errors only")

    p = argparse.ArgumentParser(prog="rainbc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("synth", parents=[common], help="write a synthetic gauge/SRE pair")
    sub.add_parser("fit", parents=[common], help="fit and save correction models")
    sub.add_parser("apply", parents=[common], help="correct SRE series with saved models")
    sub.add_parser("evaluate", parents=[common], help="score corrected series")
    sub.add_parser("run", parents=[common], help="fit, apply and evaluate in one pass")
    return p


def _overrides(args) -> list[str]:
    items = list(args.overrides)
    if args.seed is not None:
        items.append(("synth.seed=" if args.command == "synth" else "pipeline.seed=")
                     + str(args.seed))
    if args.jobs is not None:
        items.append(f"pipeline.jobs={args.jobs}")
    if args.out is not None:
        items.append(f"pipeline.out={args.out}")
    return items


def _cmd_synth(cfg) -> str:
    spec = cfg.synth
    gauge, sre = synth_generate(spec, cfg.out)
    return f"synth: {spec.n_stations} stations, {spec.start_year}-{spec.end_year} -> {gauge}, {sre}"


def _cmd_fit(cfg) -> str:
    manifest, failures = fit_models(cfg)
    return (f"fit: {len(manifest['models'])} models, {len(failures)} failures "
            f"-> {Path(cfg.out) / 'models'}")


def _cmd_apply(cfg) -> str:
    corrected, failures = apply_models(cfg)
    n = sum(len(v) for v in corrected.values())
    return f"apply: {n} corrected series, {len(failures)} failures -> {Path(cfg.out) / 'corrected'}"


def _describe(result, cfg, verb: str) -> str:
    stations = len(result.succeeded_stations)
    return (f"{verb}: {stations} stations, {len(result.summaries)} summary rows, "
            f"{len(result.failures)} failures -> {Path(cfg.out) / 'reports'}")


def _cmd_evaluate(cfg) -> str:
    return _describe(evaluate_corrected(cfg), cfg, "evaluate")


def _cmd_run(cfg) -> str:
    return _describe(run_pipeline(cfg), cfg, "run")


COMMANDS = {"synth": _cmd_synth, "fit": _cmd_fit, "apply": _cmd_apply,
            "evaluate": _cmd_evaluate, "run": _cmd_run}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    level = logging.ERROR if args.quiet else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        cfg = load_config(args.config, _overrides(args))
        line = COMMANDS[args.command](cfg)
    except (ConfigError, IngestError, ModelFileError) as exc:
        print(f"rainbc {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PipelineError as exc:
        print(f"rainbc {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
