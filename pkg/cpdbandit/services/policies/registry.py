"""Policy registry: config names to constructors."""
import logging
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from cpdbandit.helpers.errors import ConfigError, CpdBanditError
from cpdbandit.services.confbounds import RadiusKind
from cpdbandit.services.policies.base import Policy
from cpdbandit.services.policies.cpd import UCBLCPD
from cpdbandit.services.policies.impcpd import ImpCPD
from cpdbandit.services.policies.oracle import OracleRestart
from cpdbandit.services.policies.passive import (
    DTS_GAMMA,
    DUCB_XI,
    SWUCB_XI,
    UCB1,
    DiscountedTS,
    DiscountedUCB,
    SlidingWindowUCB,
    discount_for_horizon,
    window_for_horizon,
)

logger = logging.getLogger(__name__)

CPD_FAMILY = frozenset({"ucbl_cpd", "ucb_cpd", "ucbp_cpd"})


@dataclass(frozen=True)
class BuildContext:
    """What a constructor may need besides its own params."""
    n_arms: int
    horizon: int
    changepoints: tuple[int, ...] = ()
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    radius_override: str | None = None


def display_label(label: str, name: str, radius_override: str | None = None) -> str:
    """Output label of a configured policy; an overridden radius is appended."""
    if radius_override and name.lower() in CPD_FAMILY:
        return f"{label} ({radius_override})"
    return label


def policy_rng(seed: int, replication: int, label: str) -> np.random.Generator:
    """Policy-internal stream, disjoint from the reward tape of (seed, replication)."""
    return np.random.default_rng([seed, replication, zlib.crc32(label.encode("utf-8"))])


def _cpd(default_radius: str) -> Callable[[dict[str, Any], BuildContext], Policy]:
    def build(params: dict[str, Any], ctx: BuildContext) -> Policy:
        family = ctx.radius_override or params.get("radius", default_radius)
        kind = RadiusKind.from_name(family, params.get("alpha"))
        return UCBLCPD(ctx.n_arms, radius_kind=kind, delta=params.get("delta"), rng=ctx.rng)
    return build


POLICY_BUILDERS: dict[str, Callable[[dict[str, Any], BuildContext], Policy]] = {
    "ucbl_cpd": _cpd("laplace"),
    "ucb_cpd": _cpd("union"),
    "ucbp_cpd": _cpd("peeling"),
    "impcpd": lambda p, ctx: ImpCPD(
        ctx.n_arms, ctx.horizon,
        gamma=p.get("gamma", 0.05), alpha=p.get("alpha", 1.5), rng=ctx.rng,
    ),
    "ucb1": lambda p, ctx: UCB1(ctx.n_arms, rng=ctx.rng),
    "ducb": lambda p, ctx: DiscountedUCB(
        ctx.n_arms, gamma=p.get("gamma", discount_for_horizon(ctx.horizon)),
        xi=p.get("xi", DUCB_XI), rng=ctx.rng,
    ),
    "swucb": lambda p, ctx: SlidingWindowUCB(
        ctx.n_arms, window=p.get("window", window_for_horizon(ctx.horizon)),
        xi=p.get("xi", SWUCB_XI), rng=ctx.rng,
    ),
    "dts": lambda p, ctx: DiscountedTS(ctx.n_arms, gamma=p.get("gamma", DTS_GAMMA), rng=ctx.rng),
    "oracle_ucb1": lambda p, ctx: OracleRestart(
        UCB1(ctx.n_arms, rng=ctx.rng), ctx.changepoints, name="Oracle-UCB1",
    ),
    "oracle_ts": lambda p, ctx: OracleRestart(
        DiscountedTS(ctx.n_arms, gamma=1.0, rng=ctx.rng), ctx.changepoints, name="Oracle-TS",
    ),
}


def build_policy(name: str, params: dict[str, Any] | None, ctx: BuildContext) -> Policy:
    """Construct a fresh policy; raises ConfigError for unknown names or bad params."""
    key = name.lower()
    if key not in POLICY_BUILDERS:
        raise ConfigError(f"Unknown policy: {name} (known: {', '.join(sorted(POLICY_BUILDERS))})")
    if ctx.radius_override and key not in CPD_FAMILY:
        logger.debug("radius override ignored for %s", name)
    try:
        return POLICY_BUILDERS[key](dict(params or {}), ctx)
    except CpdBanditError:
        raise
    except (TypeError, KeyError, ValueError) as e:
        raise ConfigError(f"Bad parameters for {name}: {e}") from e
