"""ImpCPD: phase-based UCB that scans for changes only at phase ends.

Phase m runs until wall-clock step L_m. At a phase end the scan looks only at
the splits recorded at earlier phase ends. Without a detection the tolerance
shrinks by (1 + gamma) and the next phase length is |B| * l_m, where |B| counts
arms not yet pseudo-eliminated. Pseudo-elimination never bars an arm from
selection; it only shortens phases.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from cpdbandit.helpers.errors import ConfigError
from cpdbandit.services.confbounds import _phase_log, phase_radius_array
from cpdbandit.services.detect import ArmTracker, cpdi_scan
from cpdbandit.services.policies.base import Policy, RestartEvent, StepOutcome, argmax_lowest

logger = logging.getLogger(__name__)


def impcpd_psi(horizon: int, n_arms: int) -> float:
    """psi = T^2 / (K^2 ln K); the denominator is floored at 1 so K=1 is defined."""
    return horizon * horizon / max(n_arms * n_arms * math.log(n_arms), 1.0)


def impcpd_max_phase(horizon: int, gamma: float) -> int:
    """M = floor(0.5 * log_{1+gamma}(T / e)), floored at 0."""
    return max(0, math.floor(0.5 * math.log(horizon / math.e) / math.log1p(gamma)))


def phase_length(eps: float, psi: float) -> int:
    """l = ceil(ln(psi eps^2) / (2 eps))."""
    return math.ceil(_phase_log(eps, psi) / (2.0 * eps))


@dataclass(frozen=True)
class PhaseSchedule:
    eps: tuple[float, ...]
    lengths: tuple[int, ...]


def phase_schedule(horizon: int, n_arms: int, gamma: float) -> PhaseSchedule:
    """Tolerances and phase lengths for m = 0..M of one epoch."""
    psi = impcpd_psi(horizon, n_arms)
    eps, lengths = [], []
    e = 1.0
    for _ in range(impcpd_max_phase(horizon, gamma) + 1):
        eps.append(e)
        lengths.append(phase_length(e, psi))
        e = e / (1.0 + gamma)
    return PhaseSchedule(tuple(eps), tuple(lengths))


class ImpCPD(Policy):
    name = "ImpCPD"
    detects_changes = True

    def __init__(
        self,
        n_arms: int,
        horizon: int,
        gamma: float = 0.05,
        alpha: float = 1.5,
        rng: np.random.Generator | None = None,
    ):
        super().__init__(n_arms, rng)
        if horizon < 1:
            raise ConfigError("ImpCPD needs the horizon T")
        if not 0.0 < gamma <= 1.0:
            raise ConfigError(f"gamma must lie in (0, 1], got {gamma}")
        self.horizon = horizon
        self.gamma = gamma
        self.alpha = alpha
        self.psi = impcpd_psi(horizon, n_arms)
        self.max_phase = impcpd_max_phase(horizon, gamma)
        self.tracker = ArmTracker(n_arms, restart_time=1)
        self.schedule_frozen = False
        self.froze_in_run = False
        self._start_epoch(origin=0)

    def _start_epoch(self, origin: int) -> None:
        self.phase = 0
        self.eps = 1.0
        self.active: set[int] = set(range(self.n_arms))
        self.ell = phase_length(self.eps, self.psi)
        self.phase_end = origin + self.n_arms * self.ell
        self.boundaries: list[list[int]] = [[] for _ in range(self.n_arms)]
        self.schedule_frozen = False
        self._queue_round_robin()

    @property
    def active_count(self) -> int:
        return max(len(self.active), 1)

    def radii(self) -> np.ndarray:
        return phase_radius_array(self.tracker.counts, self.eps, self.psi, self.alpha)

    def indices(self) -> np.ndarray:
        return self.tracker.means() + self.radii()

    def select(self, t: int) -> int:
        forced = self._next_forced()
        if forced is not None:
            return forced
        return argmax_lowest(self.indices())

    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        self.tracker.record(arm, reward, t)
        if self._consume_forced(arm):
            return StepOutcome(arm, forced=True)
        if t < self.phase_end:
            return StepOutcome(arm)
        if self.phase > self.max_phase:
            if not self.schedule_frozen:
                self.schedule_frozen = True
                self.froze_in_run = True
                logger.debug("ImpCPD phase schedule frozen at t=%d (m=%d > M=%d)",
                             t, self.phase, self.max_phase)
            return StepOutcome(arm)
        return self._end_phase(arm, t)

    def _end_phase(self, arm: int, t: int) -> StepOutcome:
        detection = cpdi_scan(self.tracker, self.boundaries, self.eps, self.psi, self.alpha,
                              self.scan_stats)
        if detection is not None:
            logger.debug("ImpCPD restart at t=%d (arm %d, split %d)", t, detection.arm, detection.split)
            self.reset(t)
            self.restarts += 1
            return StepOutcome(arm, restart=RestartEvent(t, detection))

        self._pseudo_eliminate()
        self.eps = self.eps / (1.0 + self.gamma)
        self.ell = phase_length(self.eps, self.psi)
        self.phase_end = t + self.active_count * self.ell
        self.phase += 1
        for i in range(self.n_arms):
            self.boundaries[i].append(self.tracker.count(i))
        return StepOutcome(arm)

    def _pseudo_eliminate(self) -> None:
        means = self.tracker.means()
        radii = self.radii()
        best_lcb = float(np.max(means - radii))
        beaten = {i for i in self.active if means[i] + radii[i] < best_lcb}
        self.active -= beaten

    def reset(self, t: int) -> None:
        super().reset(t)
        self.tracker.reset(t)
        self._start_epoch(origin=t)
