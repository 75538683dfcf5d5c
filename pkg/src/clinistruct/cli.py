"""Command line entry point: ``clinistruct <stage> --seed N [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from .corpus import CatalogError, load_disease_catalog
from .pipeline import (
    STAGES,
    ConfigError,
    MissingInputError,
    read_config_file,
    resolve_config,
    run_all,
    run_stage,
    throughput_probe,
)

COMMANDS = (*STAGES, "all", "probe")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, help="master seed (required; no default)")
    p.add_argument("--patients-per-disease", dest="patients_per_disease", type=int)
    p.add_argument("--disease", dest="diseases", action="append", metavar="ID",
                   help="restrict to a disease; repeatable")
    p.add_argument("--noise", help="noise preset name or profile JSON path")
    p.add_argument("--anonymize", action=argparse.BooleanOptionalAction, default=None)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_const", const=True)
    mode.add_argument("--lenient", dest="strict", action="store_const", const=False)
    p.add_argument("--out", help="output root (env CLINISTRUCT_OUT overrides the config file)")
    p.add_argument("--jobs", type=int, help="worker processes for parallel stages")
    p.add_argument("--duplicate-rate", dest="duplicate_rate", type=float)
    p.add_argument("--resamples", type=int, help="bootstrap resamples in the report")
    p.add_argument("--config", help="JSON config file with RunConfig keys")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clinistruct",
                                     description="Synthetic multi-format clinical data pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common()
    helps = {
        "gen": "generate patient records and the ground-truth ledger",
        "scatter": "render records into FHIR, HL7, CSV and narrative documents",
        "anonymize": "scrub documents and load them into the object store",
        "ingest": "parse stored documents into canonical statements",
        "extract": "resolve one value per patient and variable",
        "assemble": "write per-disease mega-tables",
        "eval": "score assignments against the ledger and write the report",
        "all": "run every stage in order",
        "probe": "time ingest and extract over the stored corpus",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _fail(kind: str, message: str, **extra: Any) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")
    return 2 if kind in ("config", "usage") else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; keep the machine-readable contract
        if exc.code in (0, None):
            return 0
        return _fail("usage", "invalid command line")
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve_config(flags, file_values)
        cfg.validate(load_disease_catalog())
    except ConfigError as exc:
        return _fail("config", str(exc), problems=exc.problems)
    except TypeError as exc:
        return _fail("config", str(exc), problems=[str(exc)])
    except CatalogError as exc:
        return _fail("catalog", str(exc))
    try:
        if args.command == "all":
            result = run_all(cfg)
        elif args.command == "probe":
            result = throughput_probe(cfg)
        else:
            result = run_stage(args.command, cfg)
    except MissingInputError as exc:
        return _fail("missing-input", str(exc), stage=exc.stage, path=str(exc.path),
                     producer=exc.producer)
    except (OSError, ValueError, RuntimeError) as exc:
        return _fail(type(exc).__name__, str(exc), command=args.command)
    sys.stdout.write(json.dumps({"command": args.command, "result": result}, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
