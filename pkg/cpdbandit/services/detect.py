"""Observation logs since the last restart and the scan-statistic changepoint tests.

A split k of an arm's log compares observations 1..k with k+1..n. A change is
flagged when the two confidence intervals are disjoint. Splits are taken over
each arm's own observation sequence, never over wall-clock steps.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from cpdbandit.helpers.errors import ArmOutOfRangeError, ValueOutOfRangeError
from cpdbandit.services.confbounds import RadiusFamily, RadiusKind, radius, radius_array

logger = logging.getLogger(__name__)

_INITIAL_CAPACITY = 64


class ArmTracker:
    """Per-arm observation logs with running prefix sums.

    prefix(arm)[k] is the sum of the first k observations of that arm, so any
    slice mean costs two lookups.
    """

    def __init__(self, n_arms: int, restart_time: int = 1):
        self.n_arms = n_arms
        self.restart_time = restart_time
        self.current_time = restart_time
        self.counts = np.zeros(n_arms, dtype=np.int64)
        self._values = [np.empty(_INITIAL_CAPACITY) for _ in range(n_arms)]
        self._prefix = [np.zeros(_INITIAL_CAPACITY + 1) for _ in range(n_arms)]

    def record(self, arm: int, value: float, t: int | None = None) -> "ArmTracker":
        if not 0 <= arm < self.n_arms:
            raise ArmOutOfRangeError(f"arm {arm} outside [0, {self.n_arms})")
        if not 0.0 <= value <= 1.0:
            raise ValueOutOfRangeError(f"observation {value} outside [0, 1]")
        n = int(self.counts[arm])
        if n == len(self._values[arm]):
            self._grow(arm)
        self._values[arm][n] = value
        self._prefix[arm][n + 1] = self._prefix[arm][n] + value
        self.counts[arm] = n + 1
        if t is not None:
            self.current_time = t
        return self

    def _grow(self, arm: int) -> None:
        size = 2 * len(self._values[arm])
        values = np.empty(size)
        values[: len(self._values[arm])] = self._values[arm]
        prefix = np.zeros(size + 1)
        prefix[: len(self._prefix[arm])] = self._prefix[arm]
        self._values[arm] = values
        self._prefix[arm] = prefix

    def count(self, arm: int) -> int:
        return int(self.counts[arm])

    def observations(self, arm: int) -> np.ndarray:
        return self._values[arm][: self.count(arm)]

    def prefix(self, arm: int) -> np.ndarray:
        return self._prefix[arm][: self.count(arm) + 1]

    def slice_mean(self, arm: int, a: int, b: int) -> float:
        """Mean of observations a+1..b of `arm` (requires 0 <= a < b <= count)."""
        p = self._prefix[arm]
        return float((p[b] - p[a]) / (b - a))

    def mean(self, arm: int) -> float:
        n = self.count(arm)
        return self.slice_mean(arm, 0, n) if n else 0.0

    def means(self) -> np.ndarray:
        totals = np.array([self._prefix[i][self.counts[i]] for i in range(self.n_arms)])
        return np.divide(totals, self.counts, out=np.zeros(self.n_arms), where=self.counts > 0)

    @property
    def elapsed(self) -> int:
        """Steps since the restart, t_p - t_s + 1."""
        return self.current_time - self.restart_time + 1

    def reset(self, t: int) -> None:
        self.restart_time = t
        self.current_time = t
        self.counts[:] = 0


class Direction(str, Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class Detection:
    arm: int
    split: int
    time: int
    direction: Direction
    radius_kind: RadiusKind
    delta: float | None = None
    eps: float | None = None
    elapsed: int | None = None

    def reverify(self, tracker: ArmTracker) -> bool:
        """Re-evaluate the disjointness test at the reported split."""
        found = evaluate_split(tracker, self.arm, self.split, self.radius_kind,
                               delta=self.delta, t=self.elapsed, eps=self.eps)
        return found is self.direction


@dataclass
class ScanStats:
    calls: int = 0
    split_evals: int = 0
    detections: list[Detection] = field(default_factory=list)


def evaluate_split(
    tracker: ArmTracker, arm: int, split: int, kind: RadiusKind, *,
    delta: float | None = None, t: int | None = None, eps: float | None = None,
) -> Direction | None:
    """Direction of disjointness at one split, or None when the intervals overlap."""
    n = tracker.count(arm)
    if not 1 <= split < n:
        return None
    left = tracker.slice_mean(arm, 0, split)
    right = tracker.slice_mean(arm, split, n)
    r_left = radius(kind, split, delta=delta, t=t, eps=eps)
    r_right = radius(kind, n - split, delta=delta, t=t, eps=eps)
    if left + r_left < right - r_right:
        return Direction.UP
    if left - r_left > right + r_right:
        return Direction.DOWN
    return None


def _first_disjoint(
    prefix: np.ndarray, splits: np.ndarray, n: int, r_left: np.ndarray, r_right: np.ndarray,
) -> tuple[int, Direction] | None:
    left = prefix[splits] / splits
    right = (prefix[n] - prefix[splits]) / (n - splits)
    up = left + r_left < right - r_right
    down = left - r_left > right + r_right
    hit = up | down
    if not hit.any():
        return None
    j = int(np.argmax(hit))
    return int(splits[j]), (Direction.UP if up[j] else Direction.DOWN)


def cpd_scan(
    tracker: ArmTracker,
    delta: float,
    kind: RadiusKind,
    stats: ScanStats | None = None,
) -> Detection | None:
    """Scan every split of every arm; first hit (lowest arm, then lowest split) wins."""
    if kind.family is RadiusFamily.PHASE:
        raise ValueError("cpd_scan takes the laplace, union or peeling family")
    elapsed = tracker.elapsed
    if stats is not None:
        stats.calls += 1
    for arm in range(tracker.n_arms):
        n = tracker.count(arm)
        if n < 2:
            continue
        splits = np.arange(1, n)
        # radius depends on the count only, so the right side is the left reversed
        r = radius_array(kind, splits, delta=delta, t=elapsed)
        if stats is not None:
            stats.split_evals += n - 1
        hit = _first_disjoint(tracker.prefix(arm), splits, n, r, r[::-1])
        if hit is not None:
            split, direction = hit
            detection = Detection(arm, split, tracker.current_time, direction, kind,
                                  delta=delta, elapsed=elapsed)
            if stats is not None:
                stats.detections.append(detection)
            return detection
    return None


def cpdi_scan(
    tracker: ArmTracker,
    boundaries: Sequence[Sequence[int]],
    eps: float,
    psi: float,
    alpha: float,
    stats: ScanStats | None = None,
) -> Detection | None:
    """Scan only the recorded phase-end splits, with the phase radius at eps."""
    kind = RadiusKind.phase(psi, alpha)
    if stats is not None:
        stats.calls += 1
    for arm in range(tracker.n_arms):
        n = tracker.count(arm)
        splits = np.unique(np.asarray(boundaries[arm], dtype=np.int64))
        splits = splits[(splits >= 1) & (splits < n)]
        if splits.size == 0:
            continue
        r_left = radius_array(kind, splits, eps=eps)
        r_right = radius_array(kind, n - splits, eps=eps)
        if stats is not None:
            stats.split_evals += int(splits.size)
        hit = _first_disjoint(tracker.prefix(arm), splits, n, r_left, r_right)
        if hit is not None:
            split, direction = hit
            detection = Detection(arm, split, tracker.current_time, direction, kind, eps=eps)
            if stats is not None:
                stats.detections.append(detection)
            return detection
    return None
