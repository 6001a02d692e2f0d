"""Detection success as segments shrink: segment length ceil(c / eta) for each eta."""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from cpdbandit.helpers.errors import InvalidEtaError
from cpdbandit.schemas.experiment import ExperimentConfig, PolicySpec
from cpdbandit.services.env import RewardModel, environment_from_lengths
from cpdbandit.services.metrics import compute_metrics
from cpdbandit.services.runner import run_experiment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EtaRow:
    eta: float
    policy: str
    segment_length: int
    success_mean: float
    success_std: float
    runs: int


def segment_length_for(eta: float, base_cost: int) -> int:
    if not 0.0 < eta <= 1.0:
        raise InvalidEtaError(f"eta must lie in (0, 1], got {eta}")
    return math.ceil(base_cost / eta)


def eta_sweep(
    rows: Sequence[Sequence[float]],
    etas: Sequence[float],
    base_cost: int,
    policies: Sequence[PolicySpec],
    replications: Iterable[int],
    seed: int = 0,
    reward_model: RewardModel | None = None,
    threads: int | None = None,
    radius_override: str | None = None,
) -> list[EtaRow]:
    """Success rate (detected changepoints / G) per eta and policy, mean and std over replications."""
    lengths = [segment_length_for(eta, base_cost) for eta in etas]
    reps = list(replications)
    table = []
    for eta, length in zip(etas, lengths):
        env = environment_from_lengths(rows, length, reward_model)
        config = ExperimentConfig.model_validate({
            "name": f"eta={eta:g}",
            "environment": {"horizon": env.horizon, "segments": [
                {"start": s.start_time, "means": list(s.means)} for s in env.segments
            ]},
            "policies": [p.model_dump() for p in policies],
            "replications": max(len(reps), 1),
            "seed": seed,
        })
        result = run_experiment(config, reps, threads=threads, radius_override=radius_override, env=env)
        metrics = compute_metrics(result.runs, env, result.failures, result.labels)
        for label in result.labels:
            pm = metrics.policies[label]
            table.append(EtaRow(eta, label, length, pm.success_mean, pm.success_std, len(pm.success_rates)))
        logger.info(f"eta={eta:g}: segment length {length}, T={env.horizon}")
    return table


def eta_rows(rows: Sequence[EtaRow]) -> list[dict]:
    return [asdict(r) for r in rows]
