"""Piecewise-i.i.d. reward environments and seeded reward tapes.

Means are a function of wall-clock time only (restless model): which arm a
policy pulled never changes what any arm would have paid at a given step.
Draws come from a per-(seed, replication) tape so that two policies run on
the same replication see the same reward whenever they pull the same arm at
the same step.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import norm

from cpdbandit.helpers.errors import (
    ArmOutOfRangeError,
    EmptySpecError,
    MeanOutOfRangeError,
    RaggedRowsError,
    StartNotOneError,
    TimeOutOfRangeError,
    UnsortedSegmentsError,
)

logger = logging.getLogger(__name__)


class RewardKind(str, Enum):
    BERNOULLI = "bernoulli"
    GAUSSIAN_CLIPPED = "gaussian_clipped"


@dataclass(frozen=True)
class RewardModel:
    kind: RewardKind = RewardKind.BERNOULLI
    sigma: float = 0.0

    @classmethod
    def bernoulli(cls) -> "RewardModel":
        return cls(RewardKind.BERNOULLI)

    @classmethod
    def gaussian_clipped(cls, sigma: float) -> "RewardModel":
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return cls(RewardKind.GAUSSIAN_CLIPPED, float(sigma))


@dataclass(frozen=True)
class Segment:
    start_time: int
    means: tuple[float, ...]


class SegmentInfo(NamedTuple):
    index: int
    means: tuple[float, ...]
    best_arm: int
    best_mean: float


class RngKey(NamedTuple):
    seed: int
    replication: int
    t: int
    arm: int


@dataclass(frozen=True)
class Environment:
    segments: tuple[Segment, ...]
    horizon: int
    reward_model: RewardModel

    @property
    def n_arms(self) -> int:
        return len(self.segments[0].means)

    @property
    def n_changepoints(self) -> int:
        return len(self.segments) - 1

    @property
    def changepoints(self) -> tuple[int, ...]:
        """Start times of every segment after the first (the t_g)."""
        return tuple(s.start_time for s in self.segments[1:])

    @cached_property
    def starts(self) -> np.ndarray:
        return np.array([s.start_time for s in self.segments], dtype=np.int64)

    @cached_property
    def mean_matrix(self) -> np.ndarray:
        """(segments, K) array of means."""
        return np.array([s.means for s in self.segments], dtype=np.float64)

    @cached_property
    def mean_table(self) -> np.ndarray:
        """(T + 1, K) array; row t holds the means in force at step t (row 0 unused)."""
        steps = np.arange(self.horizon + 1)
        idx = np.searchsorted(self.starts, np.maximum(steps, 1), side="right") - 1
        return self.mean_matrix[idx]

    @cached_property
    def segment_of_step(self) -> np.ndarray:
        steps = np.arange(self.horizon + 1)
        return np.searchsorted(self.starts, np.maximum(steps, 1), side="right") - 1

    def segment_end(self, g: int) -> int:
        """Last step of segment g (inclusive)."""
        if g + 1 < len(self.segments):
            return self.segments[g + 1].start_time - 1
        return self.horizon


def build_environment(
    spec: Sequence[tuple[int, Sequence[float]]],
    horizon: int,
    reward_model: RewardModel | None = None,
) -> Environment:
    """Validate a (start_time, means) schedule and freeze it into an Environment."""
    if not spec:
        raise EmptySpecError("environment spec has no segments")
    if horizon < 1:
        raise TimeOutOfRangeError(f"horizon must be >= 1, got {horizon}")

    segments: list[Segment] = []
    n_arms = len(spec[0][1])
    if n_arms == 0:
        raise RaggedRowsError("segment 0 has no arms")

    for row, (start, means) in enumerate(spec):
        start = int(start)
        means = tuple(float(m) for m in means)
        if len(means) != n_arms:
            raise RaggedRowsError(f"segment {row} has {len(means)} means, expected {n_arms}")
        if row == 0 and start != 1:
            raise StartNotOneError(f"first segment must start at 1, got {start}")
        if segments and start <= segments[-1].start_time:
            raise UnsortedSegmentsError(
                f"segment {row} starts at {start}, not after {segments[-1].start_time}"
            )
        bad = [m for m in means if not (0.0 <= m <= 1.0) or m != m]
        if bad:
            raise MeanOutOfRangeError(f"segment {row} has means outside [0, 1]: {bad}")
        segments.append(Segment(start, means))

    if segments[-1].start_time > horizon:
        raise TimeOutOfRangeError(
            f"last segment starts at {segments[-1].start_time}, after horizon {horizon}"
        )
    return Environment(tuple(segments), int(horizon), reward_model or RewardModel.bernoulli())


def segment_lookup(env: Environment, t: int) -> SegmentInfo:
    """Segment in force at step t, with its best arm (lowest index on ties)."""
    if not 1 <= t <= env.horizon:
        raise TimeOutOfRangeError(f"t={t} outside [1, {env.horizon}]")
    g = int(np.searchsorted(env.starts, t, side="right") - 1)
    means = env.segments[g].means
    best = int(np.argmax(means))
    return SegmentInfo(g, means, best, means[best])


class RewardTape:
    """All rewards of one replication, indexed by (t, arm)."""

    def __init__(self, env: Environment, seed: int, replication: int):
        self.seed = seed
        self.replication = replication
        rng = np.random.default_rng([seed, replication])
        shape = (env.horizon + 1, env.n_arms)
        means = env.mean_table
        if env.reward_model.kind is RewardKind.BERNOULLI:
            uniforms = rng.random(shape)
            self.rewards = (uniforms < means).astype(np.float64)
        else:
            noise = rng.standard_normal(shape)
            self.rewards = np.clip(means + env.reward_model.sigma * noise, 0.0, 1.0)
        self.rewards[0] = np.nan

    def reward(self, t: int, arm: int) -> float:
        return float(self.rewards[t, arm])


@lru_cache(maxsize=16)
def reward_tape(env: Environment, seed: int, replication: int) -> RewardTape:
    return RewardTape(env, seed, replication)


def reward_sample(env: Environment, arm: int, t: int, rng_key: RngKey | tuple) -> float:
    """Reward of `arm` at step `t` for the tape named by rng_key.

    rng_key is (seed, replication, t, arm); its t and arm must agree with the
    positional ones.
    """
    key = RngKey(*rng_key)
    if not 0 <= arm < env.n_arms:
        raise ArmOutOfRangeError(f"arm {arm} outside [0, {env.n_arms})")
    if not 1 <= t <= env.horizon:
        raise TimeOutOfRangeError(f"t={t} outside [1, {env.horizon}]")
    if key.t != t or key.arm != arm:
        raise ValueError(f"rng_key {key} does not address (t={t}, arm={arm})")
    return reward_tape(env, key.seed, key.replication).reward(t, arm)


def clipped_normal_mean(mu: float, sigma: float) -> float:
    """Mean of clip(N(mu, sigma^2), 0, 1)."""
    a = (0.0 - mu) / sigma
    b = (1.0 - mu) / sigma
    inside = mu * (norm.cdf(b) - norm.cdf(a)) + sigma * (norm.pdf(a) - norm.pdf(b))
    return float(inside + norm.sf(b))


def effective_means(env: Environment) -> np.ndarray:
    """Per-segment means of the rewards actually served."""
    if env.reward_model.kind is RewardKind.BERNOULLI:
        return env.mean_matrix.copy()
    sigma = env.reward_model.sigma
    return np.vectorize(lambda m: clipped_normal_mean(m, sigma))(env.mean_matrix)


def truncate(env: Environment, horizon: int) -> Environment:
    """Same schedule cut at a shorter (or extended) horizon."""
    kept = [(s.start_time, s.means) for s in env.segments if s.start_time <= horizon]
    return build_environment(kept, horizon, env.reward_model)


def environment_from_lengths(
    rows: Sequence[Sequence[float]],
    segment_length: int,
    reward_model: RewardModel | None = None,
) -> Environment:
    """Equal-length segments, one per mean row."""
    spec = [(1 + g * segment_length, row) for g, row in enumerate(rows)]
    return build_environment(spec, segment_length * len(rows), reward_model)


EXPERIMENT1_ROWS: tuple[tuple[float, ...], ...] = (
    (0.1, 0.2, 0.9),
    (0.4, 0.9, 0.1),
    (0.5, 0.1, 0.2),
    (0.2, 0.2, 0.3),
)


def experiment1_environment() -> Environment:
    """Three Bernoulli arms, T=4000, changes at 1001, 2001 and 3001."""
    spec = [(1 + 1000 * g, row) for g, row in enumerate(EXPERIMENT1_ROWS)]
    return build_environment(spec, 4000, RewardModel.bernoulli())


def _experiment3_rows() -> tuple[tuple[float, ...], tuple[float, ...]]:
    """First row and its full mirror.

    First row: arms 1-4 are 0.4 - 0.1^j (0.3 .. 0.3999), arms 5-6 are 0.45 and 0.55,
    arms 7-10 are 0.6 + 0.1^(5-j) (0.6001 .. 0.7). The second row reverses it, so
    arm 1 goes 0.3 -> 0.7 and arm 4 goes 0.3999 -> 0.6001. The other reading, which
    keeps arms 1-4 in ascending order (0.6001 .. 0.7), is not used.
    """
    low = [0.4 - 0.1 ** j for j in range(1, 5)]
    high = [0.6 + 0.1 ** (5 - j) for j in range(1, 5)]
    first = tuple(low + [0.45, 0.55] + high)
    return first, tuple(reversed(first))


def experiment3_environment(horizon: int = 15000) -> Environment:
    """Ten clipped-Gaussian arms (sigma^2 = 0.25) flipping between two mirrored rows."""
    first, flipped = _experiment3_rows()
    spec = [(1, first), (1876, flipped), (5001, first), (9001, flipped)]
    spec = [(start, row) for start, row in spec if start <= horizon]
    return build_environment(spec, horizon, RewardModel.gaussian_clipped(0.5))
