"""Options and helpers shared by the subcommands."""
import argparse
import re
from pathlib import Path

from cpdbandit.helpers.config import Config
from cpdbandit.helpers.config_loader import ConfigLoader
from cpdbandit.helpers.errors import ConfigError
from cpdbandit.schemas.experiment import ExperimentConfig, parse_experiment_config

_SEEDS_RE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$")


def add_config_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True,
                        help="experiment config: a JSON path or a packaged name such as expt1")
    parser.add_argument("--out", default=None, help="output directory")


def add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seeds", default=None,
                        help="replication indices, 'a..b' inclusive or a single index")
    parser.add_argument("--radius", choices=["laplace", "union", "peeling"], default=None,
                        help="radius family for every CPD-family policy")
    parser.add_argument("--threads", type=int, default=None, help="worker processes")


def parse_seeds(text: str | None) -> list[int] | None:
    if text is None:
        return None
    match = _SEEDS_RE.match(text)
    if not match:
        raise ConfigError(f"--seeds expects 'a..b' or 'a', got {text!r}")
    first = int(match.group(1))
    last = int(match.group(2)) if match.group(2) is not None else first
    if last < first:
        raise ConfigError(f"--seeds range is empty: {text!r}")
    return list(range(first, last + 1))


def load_config(name_or_path: str) -> ExperimentConfig:
    document, source = ConfigLoader().load(name_or_path)
    return parse_experiment_config(document, source)


def output_dir(args: argparse.Namespace, config: ExperimentConfig) -> Path:
    if args.out:
        return Path(args.out)
    if config.output_dir:
        return Path(config.output_dir)
    return Path(Config.OUTPUT_DIR) / (config.name or "experiment")


def check_threads(threads: int | None) -> int:
    threads = Config.DEFAULT_THREADS if threads is None else threads
    if threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {threads}")
    return threads
