"""`run`: simulate every configured policy and write traces, events and the summary."""
import argparse
import logging

from cpdbandit.commands.common import (
    add_config_option,
    add_run_options,
    check_threads,
    load_config,
    output_dir,
    parse_seeds,
)
from cpdbandit.services.metrics import compute_metrics
from cpdbandit.services.runner import run_experiment
from cpdbandit.storage.csv_store import write_events, write_failures, write_summary, write_traces

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("run", help="run an experiment")
    add_config_option(parser)
    add_run_options(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    result = run_experiment(
        config,
        replications=parse_seeds(args.seeds),
        threads=check_threads(args.threads),
        radius_override=args.radius,
    )
    metrics = compute_metrics(result.runs, result.env, result.failures, result.labels)

    out = output_dir(args, config)
    write_traces(result.runs, out)
    write_events(metrics.events, out)
    write_summary(metrics.summary_rows(), out)
    write_failures(result.failures, out)

    for pm in metrics.policies.values():
        logger.info(
            f"{pm.policy}: regret {pm.mean_final_regret:.1f} +/- {pm.std_final_regret:.1f}, "
            f"detections {pm.detections}, false alarms {pm.false_alarms}, failures {pm.failures}"
        )
    return 0
