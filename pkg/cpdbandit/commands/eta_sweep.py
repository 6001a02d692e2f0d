"""`eta-sweep`: detection success rate against segment length."""
import argparse

from cpdbandit.commands.common import (
    add_config_option,
    add_run_options,
    check_threads,
    load_config,
    output_dir,
    parse_seeds,
)
from cpdbandit.helpers.errors import ConfigError
from cpdbandit.services.eta_sweep import eta_rows, eta_sweep
from cpdbandit.services.runner import environment_from_spec
from cpdbandit.storage.csv_store import write_eta_sweep


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eta-sweep", help="success rate per eta")
    add_config_option(parser)
    add_run_options(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    sweep = config.eta_sweep
    if sweep is None:
        raise ConfigError(f"{args.config}: no 'eta_sweep' block")
    env = environment_from_spec(config.environment)
    rows = sweep.rows or [list(s.means) for s in env.segments]
    replications = parse_seeds(args.seeds) or list(range(config.replications))
    table = eta_sweep(
        rows, sweep.etas, sweep.base_cost, config.policies, replications,
        seed=config.seed,
        reward_model=env.reward_model,
        threads=check_threads(args.threads),
        radius_override=args.radius,
    )
    write_eta_sweep(eta_rows(table), output_dir(args, config))
    return 0
