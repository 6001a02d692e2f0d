"""Seeded multi-replication runs.

Every (replication, policy) pair gets a fresh policy and replays the reward
tape of that replication. A failure is logged and recorded as a
ReplicationFailure; the other pairs keep running.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from cpdbandit.helpers.config import Config
from cpdbandit.schemas.experiment import EnvironmentSpec, ExperimentConfig, PolicySpec
from cpdbandit.services.env import Environment, RewardModel, build_environment, reward_tape
from cpdbandit.services.policies import BuildContext, build_policy, display_label, policy_rng
from cpdbandit.storage.csv_store import load_mean_matrix_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RestartRecord:
    replication: int
    policy: str
    time: int
    arm: int | None = None
    split: int | None = None
    direction: str | None = None
    oracle: bool = False


@dataclass
class RunResult:
    replication: int
    policy: str
    arms: np.ndarray
    rewards: np.ndarray
    inst_regret: np.ndarray
    restarts: np.ndarray
    events: list[RestartRecord] = field(default_factory=list)
    detects_changes: bool = False
    is_oracle: bool = False
    scan_calls: int = 0
    split_evals: int = 0
    wall_ms: float = 0.0
    schedule_frozen: bool = False

    @property
    def cum_regret(self) -> np.ndarray:
        return np.cumsum(self.inst_regret)

    @property
    def final_regret(self) -> float:
        return float(self.inst_regret.sum()) if len(self.inst_regret) else 0.0

    @property
    def restart_count(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class ReplicationFailure:
    replication: int
    policy: str
    error: str


@dataclass
class ExperimentResult:
    env: Environment | None
    labels: list[str]
    runs: list[RunResult]
    failures: list[ReplicationFailure]

    @property
    def horizon(self) -> int:
        return self.env.horizon if self.env is not None else 0


def environment_from_spec(spec: EnvironmentSpec) -> Environment:
    model = RewardModel.bernoulli()
    if spec.reward_model.kind == "gaussian_clipped":
        model = RewardModel.gaussian_clipped(spec.reward_model.sigma)
    if spec.csv is not None:
        return load_mean_matrix_csv(spec.csv, spec.horizon, reward_model=model)
    rows = [(s.start, s.means) for s in spec.segments]
    return build_environment(rows, spec.horizon, model)


def run_policy(
    env: Environment,
    spec: PolicySpec,
    seed: int,
    replication: int,
    radius_override: str | None = None,
) -> RunResult:
    """One policy over the whole horizon of one replication."""
    label = display_label(spec.display_label, spec.name, radius_override)
    tape = reward_tape(env, seed, replication)
    ctx = BuildContext(
        n_arms=env.n_arms,
        horizon=env.horizon,
        changepoints=env.changepoints,
        rng=policy_rng(seed, replication, label),
        radius_override=radius_override,
    )
    policy = build_policy(spec.name, spec.params, ctx)

    T = env.horizon
    arms = np.empty(T, dtype=np.int64)
    rewards = np.empty(T)
    restarts = np.zeros(T, dtype=bool)
    events: list[RestartRecord] = []

    start = time.perf_counter()
    for t in range(1, T + 1):
        arm = policy.select(t)
        reward = float(tape.rewards[t, arm])
        outcome = policy.update(arm, reward, t)
        arms[t - 1] = arm
        rewards[t - 1] = reward
        if outcome.restart is not None:
            restarts[t - 1] = True
            det = outcome.restart.detection
            events.append(RestartRecord(
                replication, label, t,
                arm=det.arm if det else None,
                split=det.split if det else None,
                direction=det.direction.value if det else None,
                oracle=policy.is_oracle,
            ))
    wall_ms = (time.perf_counter() - start) * 1000.0

    means = env.mean_table[1:]
    inst = means.max(axis=1) - means[np.arange(T), arms]
    frozen = bool(getattr(policy, "froze_in_run", False))
    if frozen:
        logger.warning(f"{label} replication {replication}: phase schedule passed M before a restart")
    return RunResult(
        replication=replication,
        policy=label,
        arms=arms,
        rewards=rewards,
        inst_regret=inst,
        restarts=restarts,
        events=events,
        detects_changes=policy.detects_changes,
        is_oracle=policy.is_oracle,
        scan_calls=policy.scan_calls,
        split_evals=policy.split_evals,
        wall_ms=wall_ms,
        schedule_frozen=frozen,
    )


def run_replication(
    env: Environment,
    policies: Sequence[PolicySpec],
    seed: int,
    replication: int,
    radius_override: str | None = None,
) -> tuple[list[RunResult], list[ReplicationFailure]]:
    """Every policy on one replication; failures are quarantined per policy."""
    runs, failures = [], []
    logger.debug(f"Replication {replication} started")
    for spec in policies:
        try:
            runs.append(run_policy(env, spec, seed, replication, radius_override))
        except Exception as e:
            label = display_label(spec.display_label, spec.name, radius_override)
            logger.exception(f"Replication {replication}, policy {label} failed")
            failures.append(ReplicationFailure(replication, label, f"{type(e).__name__}: {e}"))
    logger.debug(f"Replication {replication} finished")
    return runs, failures


def run_experiment(
    config: ExperimentConfig,
    replications: Iterable[int] | None = None,
    threads: int | None = None,
    radius_override: str | None = None,
    env: Environment | None = None,
) -> ExperimentResult:
    """Run every configured policy on every replication.

    `replications` defaults to 0..config.replications-1. Results are sorted by
    (replication, policy order) so the output does not depend on `threads`.
    """
    reps = sorted(range(config.replications) if replications is None else set(replications))
    labels = [display_label(p.display_label, p.name, radius_override) for p in config.policies]
    if config.environment.horizon == 0 and env is None:
        logger.info("Horizon is 0; nothing to run")
        return ExperimentResult(None, labels, [], [])
    env = env or environment_from_spec(config.environment)
    threads = threads or Config.DEFAULT_THREADS

    logger.info(
        f"Running {len(labels)} policies x {len(reps)} replications "
        f"(K={env.n_arms}, T={env.horizon}, G={env.n_changepoints}, threads={threads})"
    )
    progress = tqdm(reps, desc=config.name or "replications", disable=not Config.SHOW_PROGRESS)
    if threads > 1:
        chunks = Parallel(n_jobs=threads)(
            delayed(run_replication)(env, config.policies, config.seed, r, radius_override) for r in progress
        )
    else:
        chunks = [run_replication(env, config.policies, config.seed, r, radius_override) for r in progress]

    order = {label: i for i, label in enumerate(labels)}
    runs = sorted((run for chunk, _ in chunks for run in chunk),
                  key=lambda run: (run.replication, order[run.policy]))
    failures = sorted((f for _, chunk in chunks for f in chunk),
                      key=lambda f: (f.replication, order.get(f.policy, 0)))
    if failures:
        logger.warning(f"{len(failures)} (replication, policy) run(s) failed; see failures.csv")
    return ExperimentResult(env, labels, runs, failures)
