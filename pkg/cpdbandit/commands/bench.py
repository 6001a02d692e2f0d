"""`bench`: count scans and time each policy over a list of horizons."""
import argparse

from cpdbandit.commands.common import add_config_option, load_config, output_dir
from cpdbandit.helpers.config import Config
from cpdbandit.helpers.errors import ConfigError
from cpdbandit.services.bench import bench_detection_cost, bench_rows
from cpdbandit.services.runner import environment_from_spec
from cpdbandit.storage.csv_store import write_bench


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("bench", help="detection-cost benchmark")
    add_config_option(parser)
    parser.add_argument("--radius", choices=["laplace", "union", "peeling"], default=None)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if config.bench is None:
        raise ConfigError(f"{args.config}: no 'bench' block")
    env = environment_from_spec(config.environment)
    rows = bench_detection_cost(
        env,
        config.policies,
        config.bench.horizons,
        repeats=max(config.bench.repeats, Config.BENCH_REPEATS),
        seed=config.seed,
        radius_override=args.radius,
    )
    write_bench(bench_rows(rows), output_dir(args, config))
    return 0
