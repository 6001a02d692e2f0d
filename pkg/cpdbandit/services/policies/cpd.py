"""UCB with active changepoint detection at every step.

UCBL-CPD uses the Laplace radius for both its index and its scan. The same
class runs the union-bound (UCB-CPD) and peeling (UCBP-CPD) variants when
given another radius family. The confidence level is 1/t, re-evaluated at
every radius computation, unless a fixed delta is configured.
"""
import logging

import numpy as np

from cpdbandit.helpers.errors import InvalidDeltaError
from cpdbandit.services.confbounds import RadiusFamily, RadiusKind, radius_array
from cpdbandit.services.detect import ArmTracker, cpd_scan
from cpdbandit.services.policies.base import Policy, RestartEvent, StepOutcome, argmax_lowest

logger = logging.getLogger(__name__)

_NAMES = {
    RadiusFamily.LAPLACE: "UCBL-CPD",
    RadiusFamily.UNION: "UCB-CPD",
    RadiusFamily.PEELING: "UCBP-CPD",
}


class UCBLCPD(Policy):
    detects_changes = True

    def __init__(
        self,
        n_arms: int,
        radius_kind: RadiusKind | None = None,
        delta: float | None = None,
        rng: np.random.Generator | None = None,
    ):
        super().__init__(n_arms, rng)
        self.radius_kind = radius_kind or RadiusKind.laplace()
        if self.radius_kind.family is RadiusFamily.PHASE:
            raise ValueError("UCBL-CPD runs the laplace, union or peeling family")
        if delta is not None and not 0.0 < delta < 1.0:
            raise InvalidDeltaError(f"delta must lie in (0, 1), got {delta}")
        self.fixed_delta = delta
        self.name = _NAMES[self.radius_kind.family]
        self.tracker = ArmTracker(n_arms, restart_time=1)
        self._queue_round_robin()

    def delta_at(self, t: int) -> float:
        if self.fixed_delta is not None:
            return self.fixed_delta
        return 1.0 / max(t, 2)

    def indices(self, t: int) -> np.ndarray:
        counts = self.tracker.counts
        elapsed = max(t - self.tracker.restart_time + 1, 2)
        pads = radius_array(self.radius_kind, counts, delta=self.delta_at(t), t=elapsed)
        return self.tracker.means() + pads

    def select(self, t: int) -> int:
        forced = self._next_forced()
        if forced is not None:
            return forced
        return argmax_lowest(self.indices(t))

    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        self.tracker.record(arm, reward, t)
        if self._consume_forced(arm):
            return StepOutcome(arm, forced=True)

        detection = cpd_scan(self.tracker, self.delta_at(t), self.radius_kind, self.scan_stats)
        if detection is None:
            return StepOutcome(arm)

        logger.debug("%s restart at t=%d (arm %d, split %d, %s)",
                     self.name, t, detection.arm, detection.split, detection.direction.value)
        self.reset(t)
        self.restarts += 1
        return StepOutcome(arm, restart=RestartEvent(t, detection))

    def reset(self, t: int) -> None:
        super().reset(t)
        self.tracker.reset(t)
        self._queue_round_robin()
