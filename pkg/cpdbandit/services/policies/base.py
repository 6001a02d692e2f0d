"""Uniform select/update interface shared by every strategy."""
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass

import numpy as np

from cpdbandit.services.detect import Detection, ScanStats


@dataclass(frozen=True)
class RestartEvent:
    time: int
    detection: Detection | None = None


@dataclass(frozen=True)
class StepOutcome:
    arm: int
    restart: RestartEvent | None = None
    forced: bool = False


class Policy(ABC):
    """A bandit strategy.

    The runner calls select(t) then update(arm, reward, t) once per step,
    t = 1..T. Policies that restart queue a round-robin over all arms; while
    that queue is non-empty select() returns its head and update() marks the
    outcome as forced.
    """

    name: str = "policy"
    detects_changes: bool = False
    is_oracle: bool = False

    def __init__(self, n_arms: int, rng: np.random.Generator | None = None):
        self.n_arms = n_arms
        self.rng = rng if rng is not None else np.random.default_rng()
        self.scan_stats = ScanStats()
        self.restarts = 0
        self._pending: deque[int] = deque()

    @abstractmethod
    def select(self, t: int) -> int:
        ...

    @abstractmethod
    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        ...

    def reset(self, t: int) -> None:
        """Forget everything observed before step t."""
        self._pending.clear()

    def _queue_round_robin(self) -> None:
        """Pull each arm once, in index order, before trusting the index again."""
        self._pending = deque(range(self.n_arms))

    @property
    def scan_calls(self) -> int:
        return self.scan_stats.calls

    @property
    def split_evals(self) -> int:
        return self.scan_stats.split_evals

    @property
    def initializing(self) -> bool:
        return bool(self._pending)

    def _next_forced(self) -> int | None:
        return self._pending[0] if self._pending else None

    def _consume_forced(self, arm: int) -> bool:
        if self._pending and self._pending[0] == arm:
            self._pending.popleft()
            return True
        return False


def argmax_lowest(values: np.ndarray) -> int:
    """Index of the maximum, lowest index on ties."""
    return int(np.argmax(values))
