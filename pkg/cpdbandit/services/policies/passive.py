"""Baselines that never test for changes: UCB1, discounted UCB, sliding-window UCB, discounted TS.

DUCB and SWUCB use the padding 2 * sqrt(xi * ln(.) / N) with xi = 0.6. Their
discount and window default to the horizon-based values used in the
experiments: gamma_d = 1 - sqrt(1/T) / 4 and W = ceil(4 * sqrt(T ln T)).
"""
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from cpdbandit.helpers.errors import ConfigError, InvalidCountError, NoObservationsError
from cpdbandit.services.policies.base import Policy, StepOutcome, argmax_lowest

DUCB_XI = 0.6
SWUCB_XI = 0.6
DTS_GAMMA = 0.75


def ucb1_index(mean: float, n: int, t: int) -> float:
    """mean + sqrt(2 ln t / n)."""
    if n < 1:
        raise InvalidCountError(f"UCB1 index needs n >= 1, got {n}")
    if t < 1:
        raise InvalidCountError(f"UCB1 index needs t >= 1, got {t}")
    return mean + math.sqrt(2.0 * math.log(t) / n)


def discount_for_horizon(horizon: int) -> float:
    return 1.0 - 0.25 * math.sqrt(1.0 / horizon)


def window_for_horizon(horizon: int) -> int:
    if horizon < 2:
        return 1
    return math.ceil(4.0 * math.sqrt(horizon * math.log(horizon)))


class UCB1(Policy):
    """UCB1 on the steps since its last reset (local time)."""

    name = "UCB1"

    def __init__(self, n_arms: int, rng: np.random.Generator | None = None):
        super().__init__(n_arms, rng)
        self.counts = np.zeros(n_arms, dtype=np.int64)
        self.sums = np.zeros(n_arms)
        self.origin = 1
        self._queue_round_robin()

    def indices(self, t: int) -> np.ndarray:
        local = max(t - self.origin + 1, 1)
        return self.sums / self.counts + np.sqrt(2.0 * math.log(local) / self.counts)

    def select(self, t: int) -> int:
        forced = self._next_forced()
        if forced is not None:
            return forced
        return argmax_lowest(self.indices(t))

    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        self.counts[arm] += 1
        self.sums[arm] += reward
        return StepOutcome(arm, forced=self._consume_forced(arm))

    def reset(self, t: int) -> None:
        super().reset(t)
        self.counts[:] = 0
        self.sums[:] = 0.0
        self.origin = t
        self._queue_round_robin()


@dataclass
class DiscountedStats:
    """Discounted reward sums and pull counts, one entry per arm."""
    sums: np.ndarray
    counts: np.ndarray
    gamma: float

    @classmethod
    def empty(cls, n_arms: int, gamma: float) -> "DiscountedStats":
        return cls(np.zeros(n_arms), np.zeros(n_arms), gamma)

    def step(self, arm: int, reward: float) -> None:
        self.sums *= self.gamma
        self.counts *= self.gamma
        self.sums[arm] += reward
        self.counts[arm] += 1.0

    @property
    def total(self) -> float:
        return float(self.counts.sum())


def ducb_index(state: DiscountedStats, arm: int, xi: float = DUCB_XI) -> float:
    """Discounted mean + 2 sqrt(xi ln(n_gamma) / N_gamma(arm))."""
    n = float(state.counts[arm])
    if n <= 0.0:
        raise NoObservationsError(f"arm {arm} has no discounted pulls")
    padding = 2.0 * math.sqrt(xi * math.log(state.total) / n)
    return float(state.sums[arm]) / n + padding


class DiscountedUCB(Policy):
    name = "DUCB"

    def __init__(self, n_arms: int, gamma: float, xi: float = DUCB_XI,
                 rng: np.random.Generator | None = None):
        super().__init__(n_arms, rng)
        if not 0.0 < gamma <= 1.0:
            raise ConfigError(f"DUCB discount must lie in (0, 1], got {gamma}")
        self.xi = xi
        self.stats = DiscountedStats.empty(n_arms, gamma)

    def indices(self) -> np.ndarray:
        counts = self.stats.counts
        seen = counts > 0
        out = np.full(self.n_arms, np.inf)
        log_total = math.log(self.stats.total) if seen.any() else 0.0
        out[seen] = self.stats.sums[seen] / counts[seen] + 2.0 * np.sqrt(self.xi * log_total / counts[seen])
        return out

    def select(self, t: int) -> int:
        return argmax_lowest(self.indices())

    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        self.stats.step(arm, reward)
        return StepOutcome(arm)

    def reset(self, t: int) -> None:
        super().reset(t)
        self.stats = DiscountedStats.empty(self.n_arms, self.stats.gamma)


@dataclass
class WindowStats:
    """Pulls of the last `window` steps; decision t sees steps t-W .. t-1."""
    n_arms: int
    window: int
    counts: np.ndarray = field(init=False)
    sums: np.ndarray = field(init=False)
    _history: deque = field(init=False, default_factory=deque)

    def __post_init__(self):
        self.counts = np.zeros(self.n_arms, dtype=np.int64)
        self.sums = np.zeros(self.n_arms)

    def push(self, t: int, arm: int, reward: float) -> None:
        self._history.append((t, arm, reward))
        self.counts[arm] += 1
        self.sums[arm] += reward

    def advance(self, t: int) -> None:
        """Evict steps older than t - W; idempotent for non-decreasing t."""
        oldest = t - self.window
        while self._history and self._history[0][0] < oldest:
            _, arm, reward = self._history.popleft()
            self.counts[arm] -= 1
            self.sums[arm] -= reward
            if self.counts[arm] == 0:
                self.sums[arm] = 0.0


def swucb_index(state: WindowStats, arm: int, t: int, xi: float = SWUCB_XI) -> float:
    """Window mean + 2 sqrt(xi ln(min(t, W)) / N_W); +inf for an arm absent from the window."""
    state.advance(t)
    n = int(state.counts[arm])
    if n == 0:
        return math.inf
    return float(state.sums[arm]) / n + 2.0 * math.sqrt(xi * math.log(min(t, state.window)) / n)


class SlidingWindowUCB(Policy):
    name = "SWUCB"

    def __init__(self, n_arms: int, window: int, xi: float = SWUCB_XI,
                 rng: np.random.Generator | None = None):
        super().__init__(n_arms, rng)
        if window < 1:
            raise ConfigError(f"SWUCB window must be >= 1, got {window}")
        self.xi = xi
        self.stats = WindowStats(n_arms, window)

    def indices(self, t: int) -> np.ndarray:
        self.stats.advance(t)
        counts = self.stats.counts
        seen = counts > 0
        out = np.full(self.n_arms, np.inf)
        log_w = math.log(min(t, self.stats.window))
        out[seen] = self.stats.sums[seen] / counts[seen] + 2.0 * np.sqrt(self.xi * log_w / counts[seen])
        return out

    def select(self, t: int) -> int:
        return argmax_lowest(self.indices(t))

    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        self.stats.push(t, arm, reward)
        return StepOutcome(arm)

    def reset(self, t: int) -> None:
        super().reset(t)
        self.stats = WindowStats(self.n_arms, self.stats.window)


class DiscountedTS(Policy):
    """Beta-Bernoulli Thompson sampling with every arm's counts discounted each round.

    Rewards strictly between 0 and 1 are replaced by a coin flip with that
    success probability. gamma = 1 is plain Thompson sampling.
    """

    name = "DTS"

    def __init__(self, n_arms: int, gamma: float = DTS_GAMMA,
                 rng: np.random.Generator | None = None):
        super().__init__(n_arms, rng)
        if not 0.0 < gamma <= 1.0:
            raise ConfigError(f"DTS discount must lie in (0, 1], got {gamma}")
        self.gamma = gamma
        self.successes = np.zeros(n_arms)
        self.failures = np.zeros(n_arms)

    def posterior_means(self) -> np.ndarray:
        return (self.successes + 1.0) / (self.successes + self.failures + 2.0)

    def select(self, t: int) -> int:
        theta = self.rng.beta(self.successes + 1.0, self.failures + 1.0)
        return argmax_lowest(theta)

    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        if reward not in (0.0, 1.0):
            reward = 1.0 if self.rng.random() < reward else 0.0
        self.successes *= self.gamma
        self.failures *= self.gamma
        self.successes[arm] += reward
        self.failures[arm] += 1.0 - reward
        return StepOutcome(arm)

    def reset(self, t: int) -> None:
        super().reset(t)
        self.successes[:] = 0.0
        self.failures[:] = 0.0
