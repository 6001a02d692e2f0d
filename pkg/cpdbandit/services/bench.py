"""Detection-cost benchmark: scan invocations, split evaluations and wall-clock per horizon."""
import logging
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from cpdbandit.schemas.experiment import PolicySpec
from cpdbandit.services.env import Environment, truncate
from cpdbandit.services.runner import run_policy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchRow:
    policy: str
    horizon: int
    scan_calls: int
    split_evals: int
    restarts: int
    wall_ms_median: float
    repeats: int


def bench_detection_cost(
    env: Environment,
    policies: Sequence[PolicySpec],
    horizons: Sequence[int],
    repeats: int = 5,
    seed: int = 0,
    radius_override: str | None = None,
) -> list[BenchRow]:
    """Run each policy `repeats` times on the environment cut at each horizon.

    Counters come from the first repeat (every repeat replays the same tape);
    wall-clock is the median over repeats.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    rows = []
    for horizon in horizons:
        cut = truncate(env, horizon)
        for spec in policies:
            runs = [run_policy(cut, spec, seed, 0, radius_override) for _ in range(repeats)]
            first = runs[0]
            row = BenchRow(
                policy=first.policy,
                horizon=horizon,
                scan_calls=first.scan_calls,
                split_evals=first.split_evals,
                restarts=first.restart_count,
                wall_ms_median=float(np.median([r.wall_ms for r in runs])),
                repeats=repeats,
            )
            logger.info(
                f"bench {row.policy} T={horizon}: {row.scan_calls} scans, "
                f"{row.split_evals} split evals, {row.wall_ms_median:.1f} ms"
            )
            rows.append(row)
    return rows


def bench_rows(rows: Sequence[BenchRow]) -> list[dict]:
    return [asdict(r) for r in rows]
