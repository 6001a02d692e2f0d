"""Command-line entry point: `cpd-bandits <run|bounds|bench|eta-sweep> --config ...`."""
import argparse
import sys

from cpdbandit import __version__
from cpdbandit.commands import bench, bounds, eta_sweep, run
from cpdbandit.helpers.config import Config
from cpdbandit.helpers.errors import CpdBanditError
from cpdbandit.helpers.logger import setup_logger

logger = setup_logger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpd-bandits",
        description="Piecewise-stationary bandits with changepoint detection",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  cpd-bandits run --config expt1 --seeds 0..9 --threads 4
  cpd-bandits bounds --config expt1
  cpd-bandits bench --config expt5_bench
  cpd-bandits eta-sweep --config eta_sweep --seeds 0..19
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (run, bounds, bench, eta_sweep):
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        Config.validate()
        return args.handler(args)
    except CpdBanditError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except Exception:
        logger.exception(f"{args.command}: unexpected failure")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
