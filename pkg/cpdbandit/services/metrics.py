"""Regret, detection delay, miss and false-alarm statistics.

A restart detects changepoint g when it is the first restart in
(t_g, t_{g+1}] (T + 1 closes the last window); its delay is the restart time
minus t_g. Every other restart is a false alarm. Oracle resets are reported
but excluded from these counts.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from cpdbandit.helpers.errors import InconsistentTraceError
from cpdbandit.services.analysis import optimality_gaps
from cpdbandit.services.env import Environment
from cpdbandit.services.runner import ReplicationFailure, RunResult

logger = logging.getLogger(__name__)

DETECTION = "detection"
FALSE_ALARM = "false_alarm"
ORACLE_RESET = "oracle_reset"


@dataclass(frozen=True)
class ClassifiedEvent:
    replication: int
    policy: str
    time: int
    arm: int | None
    split: int | None
    kind: str
    true_cp: int | None = None

    @property
    def delay(self) -> int | None:
        return self.time - self.true_cp if self.true_cp is not None else None


@dataclass(frozen=True)
class Attribution:
    detections: dict[int, int]  # changepoint index -> restart time
    false_alarms: tuple[int, ...]

    def delay(self, g: int, changepoints: Sequence[int]) -> int:
        return self.detections[g] - changepoints[g]


def attribute_restarts(restart_times: Sequence[int], changepoints: Sequence[int], horizon: int) -> Attribution:
    """Split restart times into per-changepoint detections and false alarms."""
    bounds = list(changepoints) + [horizon + 1]
    detections: dict[int, int] = {}
    false_alarms = []
    for time in sorted(restart_times):
        # window g is (t_g, t_{g+1}]
        g = int(np.searchsorted(bounds, time, side="left")) - 1
        if 0 <= g < len(changepoints) and g not in detections:
            detections[g] = time
        else:
            false_alarms.append(time)
    return Attribution(detections, tuple(false_alarms))


def segment_pull_counts(run: RunResult, env: Environment) -> np.ndarray:
    """(segments, K) pull counts of one run."""
    counts = np.zeros((len(env.segments), env.n_arms), dtype=np.int64)
    seg = env.segment_of_step[1:len(run.arms) + 1]
    np.add.at(counts, (seg, run.arms), 1)
    return counts


def decomposed_regret(run: RunResult, env: Environment) -> float:
    """Sum over segments and arms of optimality gap times pulls."""
    return float(np.sum(optimality_gaps(env) * segment_pull_counts(run, env)))


def check_regret_identity(run: RunResult, env: Environment) -> None:
    from_trace = float(run.cum_regret[-1]) if len(run.arms) else 0.0
    from_gaps = decomposed_regret(run, env)
    if abs(from_trace - from_gaps) > 1e-9 * max(1.0, abs(from_trace)):
        raise InconsistentTraceError(
            f"{run.policy} replication {run.replication}: trace regret {from_trace!r} "
            f"!= gap decomposition {from_gaps!r}"
        )


@dataclass
class ChangepointStats:
    index: int
    time: int
    delays: list[int] = field(default_factory=list)
    misses: int = 0

    @property
    def detection_rate(self) -> float:
        total = len(self.delays) + self.misses
        return len(self.delays) / total if total else math.nan


@dataclass
class PolicyMetrics:
    policy: str
    is_oracle: bool
    final_regrets: list[float] = field(default_factory=list)
    detections: int = 0
    misses: int = 0
    false_alarms: int = 0
    delays: list[int] = field(default_factory=list)
    success_rates: list[float] = field(default_factory=list)
    scan_calls: list[int] = field(default_factory=list)
    split_evals: list[int] = field(default_factory=list)
    wall_ms: list[float] = field(default_factory=list)
    frozen_runs: int = 0
    failures: int = 0
    per_changepoint: list[ChangepointStats] = field(default_factory=list)

    @property
    def runs(self) -> int:
        return len(self.final_regrets)

    @property
    def mean_final_regret(self) -> float:
        return float(np.mean(self.final_regrets)) if self.final_regrets else math.nan

    @property
    def std_final_regret(self) -> float:
        return float(np.std(self.final_regrets)) if self.final_regrets else math.nan

    @property
    def mean_delay(self) -> float:
        return float(np.mean(self.delays)) if self.delays else math.nan

    @property
    def median_delay(self) -> float:
        return float(np.median(self.delays)) if self.delays else math.nan

    @property
    def success_mean(self) -> float:
        return float(np.mean(self.success_rates)) if self.success_rates else math.nan

    @property
    def success_std(self) -> float:
        return float(np.std(self.success_rates)) if self.success_rates else math.nan

    def summary_row(self) -> dict:
        tracked = not self.is_oracle
        return {
            "policy": self.policy,
            "mean_final_regret": self.mean_final_regret,
            "std": self.std_final_regret,
            "detections": self.detections if tracked else None,
            "misses": self.misses if tracked else None,
            "false_alarms": self.false_alarms if tracked else None,
            "mean_delay": self.mean_delay if tracked else None,
            "scan_calls": float(np.mean(self.scan_calls)) if self.scan_calls else 0.0,
            "wall_ms": float(np.mean(self.wall_ms)) if self.wall_ms else math.nan,
            "failures": self.failures,
        }


@dataclass
class Metrics:
    policies: dict[str, PolicyMetrics]
    events: list[ClassifiedEvent]

    def summary_rows(self) -> list[dict]:
        return [m.summary_row() for m in self.policies.values()]


def compute_metrics(
    runs: Iterable[RunResult],
    env: Environment | None,
    failures: Iterable[ReplicationFailure] = (),
    labels: Sequence[str] | None = None,
) -> Metrics:
    """Aggregate runs per policy and classify every restart."""
    policies: dict[str, PolicyMetrics] = {}
    for label in labels or []:
        policies[label] = PolicyMetrics(label, is_oracle=False)
    events: list[ClassifiedEvent] = []
    changepoints = list(env.changepoints) if env is not None else []

    for run in runs:
        pm = policies.setdefault(run.policy, PolicyMetrics(run.policy, run.is_oracle))
        pm.is_oracle = run.is_oracle
        if not pm.per_changepoint:
            pm.per_changepoint = [ChangepointStats(g, cp) for g, cp in enumerate(changepoints)]
        check_regret_identity(run, env)
        pm.final_regrets.append(run.final_regret)
        pm.scan_calls.append(run.scan_calls)
        pm.split_evals.append(run.split_evals)
        pm.wall_ms.append(run.wall_ms)
        pm.frozen_runs += int(run.schedule_frozen)

        if run.is_oracle:
            events.extend(
                ClassifiedEvent(run.replication, run.policy, e.time, None, None, ORACLE_RESET)
                for e in run.events
            )
            continue

        attribution = attribute_restarts([e.time for e in run.events], changepoints, env.horizon)
        detected_at = {time: g for g, time in attribution.detections.items()}
        for e in run.events:
            g = detected_at.get(e.time)
            if g is None:
                events.append(ClassifiedEvent(run.replication, run.policy, e.time, e.arm, e.split, FALSE_ALARM))
            else:
                events.append(ClassifiedEvent(run.replication, run.policy, e.time, e.arm, e.split,
                                              DETECTION, changepoints[g]))
        pm.detections += len(attribution.detections)
        pm.misses += len(changepoints) - len(attribution.detections)
        pm.false_alarms += len(attribution.false_alarms)
        for g, stats in enumerate(pm.per_changepoint):
            if g in attribution.detections:
                delay = attribution.delay(g, changepoints)
                stats.delays.append(delay)
                pm.delays.append(delay)
            else:
                stats.misses += 1
        if changepoints:
            pm.success_rates.append(len(attribution.detections) / len(changepoints))

    for failure in failures:
        pm = policies.setdefault(failure.policy, PolicyMetrics(failure.policy, is_oracle=False))
        pm.failures += 1

    for pm in policies.values():
        if pm.frozen_runs:
            logger.warning(f"{pm.policy}: {pm.frozen_runs} run(s) froze the phase schedule")
    return Metrics(policies, events)
