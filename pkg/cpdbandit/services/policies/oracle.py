"""Baselines told the true changepoints: the wrapped policy restarts exactly at each t_g."""
from cpdbandit.services.policies.base import Policy, RestartEvent, StepOutcome


class OracleRestart(Policy):
    is_oracle = True

    def __init__(self, base: Policy, changepoints: tuple[int, ...] | list[int], name: str | None = None):
        super().__init__(base.n_arms, base.rng)
        self.base = base
        self.changepoints = frozenset(int(t) for t in changepoints)
        self.name = name or f"Oracle-{base.name}"
        self._reset_at: int | None = None

    def select(self, t: int) -> int:
        if t in self.changepoints and self._reset_at != t:
            self.base.reset(t)
            self.restarts += 1
            self._reset_at = t
        return self.base.select(t)

    def update(self, arm: int, reward: float, t: int) -> StepOutcome:
        outcome = self.base.update(arm, reward, t)
        if self._reset_at == t:
            return StepOutcome(arm, restart=RestartEvent(t), forced=outcome.forced)
        return outcome

    def reset(self, t: int) -> None:
        self.base.reset(t)


def oracle_restart_wrap(base: Policy, changepoints: tuple[int, ...] | list[int]) -> OracleRestart:
    """Wrap `base` so its state is wiped at every true changepoint."""
    return OracleRestart(base, changepoints)
