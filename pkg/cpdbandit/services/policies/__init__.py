from cpdbandit.services.policies.base import Policy, RestartEvent, StepOutcome, argmax_lowest
from cpdbandit.services.policies.cpd import UCBLCPD
from cpdbandit.services.policies.impcpd import ImpCPD, phase_schedule
from cpdbandit.services.policies.oracle import OracleRestart, oracle_restart_wrap
from cpdbandit.services.policies.passive import (
    UCB1,
    DiscountedTS,
    DiscountedUCB,
    SlidingWindowUCB,
    ducb_index,
    swucb_index,
    ucb1_index,
)
from cpdbandit.services.policies.registry import BuildContext, build_policy, display_label, policy_rng

__all__ = [
    "Policy", "RestartEvent", "StepOutcome", "argmax_lowest",
    "UCBLCPD", "ImpCPD", "phase_schedule",
    "OracleRestart", "oracle_restart_wrap",
    "UCB1", "DiscountedTS", "DiscountedUCB", "SlidingWindowUCB",
    "ducb_index", "swucb_index", "ucb1_index",
    "BuildContext", "build_policy", "display_label", "policy_rng",
]
