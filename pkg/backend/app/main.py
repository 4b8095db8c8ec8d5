"""
Localized Sums Lab - batch experiment driver
- seeded, configured runs of every statistic
- CSV/JSON outputs with (version, config hash, seed) headers
- exit codes: 0 ok, 2 config, 3 horizon/capacity, 4 invariant, 1 other
"""

import argparse
import json
import logging
import sys
import traceback
from pathlib import Path
from typing import List, Optional

from app import __version__
from app.commands import COMMANDS
from app.errors import LabError
from app.models import CONFIG_MODELS, ExperimentConfig, RunRecord, envelope_schema
from app.settings import get_settings
from app.utils.cache import sieve_cache
from app.utils.logger import setup_logging
from app.utils.serialization import canonical_json, config_hash, render_csv, render_json, sha256_hex, to_plain
from app.utils.stats import run_stats
from app.utils.summary_generator import generate_summary
from app.utils.validators import config_validator

logger = logging.getLogger(__name__)


# -------------------------------------------------
# Argument parsing
# -------------------------------------------------
class PrintSchemaAction(argparse.Action):
    """Print the JSON schema of the run envelope and exit"""

    def __init__(self, option_strings, dest=argparse.SUPPRESS, default=argparse.SUPPRESS, help=None):
        super().__init__(option_strings=option_strings, dest=dest, default=default, nargs=0, help=help)

    def __call__(self, parser, namespace, values, option_string=None):
        sys.stdout.write(json.dumps(envelope_schema(), indent=2) + "\n")
        parser.exit()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lab",
        description="Localized maxima of partial sums, Brownian analogs and prime-factor statistics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--print-schema", action=PrintSchemaAction, help="print the JSON output schema and exit")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in CONFIG_MODELS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON experiment config")
        cmd.add_argument("--seed", type=int, help="override the config seed")
        cmd.add_argument("--out", help="output path (stdout when omitted)")
        cmd.add_argument("--format", choices=("csv", "json"), help="output format")
        cmd.add_argument("--threads", type=int, help="worker threads (results do not depend on it)")
        cmd.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")
    return parser


def load_config(subcommand: str, args: argparse.Namespace) -> ExperimentConfig:
    """Read the config file (if any), apply flag overrides, validate"""
    source = args.config or "<defaults>"
    data = config_validator.read_json(args.config) if args.config else {}
    for flag in ("seed", "out", "format", "threads"):
        value = getattr(args, flag, None)
        if value is not None:
            data[flag] = value
    return config_validator.validate(CONFIG_MODELS[subcommand], data, source)


# -------------------------------------------------
# Running
# -------------------------------------------------
def execute(subcommand: str, config: ExperimentConfig) -> tuple:
    """Run one subcommand; returns (RunRecord, csv columns)"""
    digest = config_hash({"subcommand": subcommand, **config.hashed_fields()})
    logger.info(f"RUN | {subcommand} | seed={config.seed} | config={digest[:8]}")

    with run_stats.time_run() as timing:
        try:
            result = COMMANDS[subcommand](config)
        except Exception:
            run_stats.increment("failed_runs")
            raise

    payload = to_plain({"rows": result["rows"], "summary": result["summary"]})
    payload_sha = sha256_hex(canonical_json(payload))
    record = RunRecord(
        version=__version__,
        subcommand=subcommand,
        config_hash=digest,
        seed=config.seed,
        wall_time_s=timing["wall_time"],
        payload_sha256=payload_sha,
        payload=payload,
    )
    logger.info(
        f"DONE | {subcommand} | Duration: {timing['wall_time']:.3f}s | payload={payload_sha[:8]}"
    )
    logger.info(generate_summary(subcommand, payload["summary"]))
    logger.debug(f"Run stats: {run_stats.get_stats()}")
    logger.debug(f"Sieve cache: {sieve_cache.stats()}")
    return record, result.get("columns")


def render(record: RunRecord, fmt: str, columns: Optional[List[str]] = None) -> str:
    if fmt == "csv":
        return render_csv(record.payload["rows"], record.header(), columns)
    return render_json(record.envelope())


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    # stdout carries the CSV/JSON output
    setup_logging(args.log_level or settings.log_level, settings.log_dir or None, stream=sys.stderr)
    subcommand = args.subcommand

    try:
        config = load_config(subcommand, args)
        record, columns = execute(subcommand, config)
        text = render(record, config.format, columns)
        if config.out:
            path = Path(config.out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            logger.info(f"Wrote {config.format} output to {path}")
        else:
            sys.stdout.write(text)
        return 0
    except LabError as e:
        logger.error(f"ERROR | {subcommand} | {type(e).__name__}: {e.message}")
        logger.debug(traceback.format_exc())
        sys.stderr.write(json.dumps(to_plain(e.to_dict()), sort_keys=True) + "\n")
        return e.exit_code
    except Exception as e:
        logger.error(f"ERROR | {subcommand} | Unhandled {type(e).__name__}: {e}")
        logger.error(traceback.format_exc())
        return 1


if __name__ == "__main__":
    sys.exit(main())
