"""`bounds`: evaluate the analytical quantities for the configured environment."""
import argparse
import json
import logging

from cpdbandit.commands.common import add_config_option, load_config, output_dir
from cpdbandit.services.analysis import regret_bounds, validate_assumptions
from cpdbandit.services.runner import environment_from_spec
from cpdbandit.storage.csv_store import to_jsonable, write_bounds

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("bounds", help="evaluate regret bounds and assumptions")
    add_config_option(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    env = environment_from_spec(config.environment)
    opts = config.bounds
    report = regret_bounds(env, t=opts.t, delta=opts.delta, gamma=opts.gamma,
                           eta=opts.eta, strict=opts.strict)
    assumptions = validate_assumptions(env, report.delta, opts.eta)
    report.assumptions = assumptions.to_dict()
    for flag in report.flags:
        logger.warning(flag)

    write_bounds(report.to_dict(), output_dir(args, config))
    print(json.dumps(to_jsonable(report.to_dict()), indent=2))
    return 0
