"""Closed-form evaluators: sample sizes, detection delay, detectable gaps, hardness and regret bounds.

Changepoint g (0-indexed) separates segment g from segment g+1 and happens
at t_g = start of segment g+1. Unless a window is supplied, the window x used
for the detectable threshold at t_g is the length of segment g, t_g minus the
start of segment g. All logs are natural.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from cpdbandit.helpers.errors import (
    ConfigError,
    EtaTooSmallError,
    GapTooSmallError,
    InvalidCountError,
    InvalidDeltaError,
    InvalidEtaError,
    InvalidGapError,
    LastChangepointError,
)
from cpdbandit.services.env import Environment

logger = logging.getLogger(__name__)

# relative slack when comparing a gap with the detectable threshold
_THRESHOLD_RTOL = 1e-12


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise InvalidDeltaError(f"delta must lie in (0, 1), got {delta}")


def min_samples(x: int, gap: float, delta: float) -> int:
    """Samples needed to control a deviation `gap` with probability 1 - delta: ceil(ln(2x^2/delta) / (2 gap^2))."""
    if not 0.0 < gap <= 1.0:
        raise InvalidGapError(f"gap must lie in (0, 1], got {gap}")
    if x < 1:
        raise InvalidCountError(f"window must be >= 1, got {x}")
    _check_delta(delta)
    return math.ceil(0.5 * math.log(2.0 * x * x / delta) / (gap * gap))


def oracle_delay_bound(t: int, gap: float, delta: float, eta: float, n_arms: int) -> float:
    """Worst-case delay of a detector that saw every sample since the previous changepoint.

    eta * ln(t/delta) * K * ln(t^2/delta) / (2 gap^2) + K * delta
    """
    if not 0.0 < eta < 1.0:
        raise InvalidEtaError(f"eta must lie in (0, 1), got {eta}")
    if n_arms == 0:
        return 0.0
    if gap <= 0.0:
        raise InvalidGapError(f"gap must be positive, got {gap}")
    _check_delta(delta)
    c = eta * math.log(t / delta)
    return c * n_arms * math.log(t * t / delta) / (2.0 * gap * gap) + n_arms * delta


def detectable_gap_threshold(x: int, delta: float) -> float:
    """sqrt(ln(2x^2/delta) / (2x))."""
    if x < 1:
        raise InvalidCountError(f"window must be >= 1, got {x}")
    _check_delta(delta)
    return math.sqrt(math.log(2.0 * x * x / delta) / (2.0 * x))


def gap_floor(horizon: int) -> float:
    """sqrt(e/T): gaps below this are too small for any finite bound term."""
    return math.sqrt(math.e / horizon)


@dataclass(frozen=True)
class ChangepointGaps:
    index: int
    time: int
    window: int
    threshold: float
    chg: np.ndarray
    opt_before: np.ndarray
    opt_after: np.ndarray
    detectable: tuple[int, ...]
    undetectable: tuple[int, ...]
    tiny: tuple[int, ...]


@dataclass(frozen=True)
class GapProfile:
    delta: float
    floor: float
    opt: np.ndarray  # (segments, K)
    changepoints: tuple[ChangepointGaps, ...]


def optimality_gaps(env: Environment) -> np.ndarray:
    means = env.mean_matrix
    return means.max(axis=1, keepdims=True) - means


def _window(env: Environment, g: int, windows: Sequence[int] | None) -> int:
    if windows is not None:
        return int(windows[g])
    return env.segments[g + 1].start_time - env.segments[g].start_time


def gap_profile(env: Environment, delta: float, windows: Sequence[int] | None = None) -> GapProfile:
    """Optimality and changepoint gaps, thresholds and the detectable set at every changepoint."""
    _check_delta(delta)
    opt = optimality_gaps(env)
    floor = gap_floor(env.horizon)
    means = env.mean_matrix
    entries = []
    for g in range(env.n_changepoints):
        x = _window(env, g, windows)
        threshold = detectable_gap_threshold(x, delta)
        chg = np.abs(means[g] - means[g + 1])
        reach = chg >= threshold * (1.0 - _THRESHOLD_RTOL)
        entries.append(ChangepointGaps(
            index=g,
            time=env.segments[g + 1].start_time,
            window=x,
            threshold=threshold,
            chg=chg,
            opt_before=opt[g],
            opt_after=opt[g + 1],
            detectable=tuple(int(i) for i in np.flatnonzero(reach)),
            undetectable=tuple(int(i) for i in np.flatnonzero(~reach & (chg >= floor))),
            tiny=tuple(int(i) for i in np.flatnonzero(chg < floor)),
        ))
    return GapProfile(delta, floor, opt, tuple(entries))


@dataclass(frozen=True)
class HardnessReport:
    index: int
    h1: float
    h2: float
    optimality_sum: float
    changepoint_sum: float
    threshold: float
    sandwich_holds: bool


def _hardness_at(cp: ChangepointGaps, n_arms: int) -> HardnessReport:
    sub = cp.opt_before[cp.opt_before > 0]
    optimality_sum = float(np.sum(1.0 / sub ** 2)) if sub.size else 0.0
    det = np.asarray(cp.detectable, dtype=np.int64)
    changepoint_sum = float(np.sum(1.0 / cp.chg[det] ** 2)) if det.size else 0.0
    h1 = max(optimality_sum, changepoint_sum)
    h2 = float(cp.opt_after.max()) / cp.threshold
    upper = n_arms * h2 / cp.threshold ** 2
    sandwich = h2 <= h1 * (1.0 + 1e-12) and h1 <= upper * (1.0 + 1e-12)
    return HardnessReport(cp.index, h1, h2, optimality_sum, changepoint_sum, cp.threshold, sandwich)


def hardness(env: Environment, g: int, delta: float, x: int | None = None) -> HardnessReport:
    """H1 and H2 at changepoint g; the optimality sum runs over suboptimal arms only."""
    if not 0 <= g < env.n_changepoints:
        raise LastChangepointError(
            f"changepoint {g} has no following segment (environment has {env.n_changepoints})"
        )
    windows = None
    if x is not None:
        windows = [_window(env, j, None) for j in range(env.n_changepoints)]
        windows[g] = x
    profile = gap_profile(env, delta, windows)
    return _hardness_at(profile.changepoints[g], env.n_arms)


@dataclass
class BoundReport:
    horizon: int
    t: int
    delta: float
    gamma: float
    eta: float
    per_changepoint: list[dict[str, Any]]
    theorem1: dict[str, float]
    theorem2: dict[str, float]
    theorem3: dict[str, Any]
    corollary1: dict[str, float]
    flags: list[str] = field(default_factory=list)
    gap_offenders: list[tuple[int, int, float]] = field(default_factory=list)
    assumptions: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def c1_constant(gamma: float, exponent: int = 4) -> float:
    """((1 + gamma) / gamma) ** exponent."""
    return ((1.0 + gamma) / gamma) ** exponent


def _pos_log(value: float) -> float:
    return max(math.log(value), 0.0) if value > 0 else 0.0


def regret_bounds(
    env: Environment,
    t: int | None = None,
    delta: float | None = None,
    gamma: float = 0.05,
    eta: float = 0.5,
    windows: Sequence[int] | None = None,
    strict: bool = False,
) -> BoundReport:
    """Evaluate the regret bounds of both detectors and the oracle lower bound term by term.

    t defaults to the horizon T and delta to 1/T. The anytime bound is
    evaluated at t, the phase-based bound at T. With strict=True an eta below
    a theorem's requirement raises EtaTooSmallError and changepoint gaps below
    sqrt(e/T) raise GapTooSmallError; otherwise both are reported as flags.
    """
    T = env.horizon
    t = T if t is None else int(t)
    if t < 2:
        raise InvalidCountError(f"bounds need t >= 2, got {t}")
    delta = 1.0 / T if delta is None else delta
    if not 0.0 < gamma <= 1.0:
        raise ConfigError(f"gamma must lie in (0, 1], got {gamma}")
    if not 0.0 < eta < 1.0:
        raise InvalidEtaError(f"eta must lie in (0, 1), got {eta}")

    K = env.n_arms
    G = env.n_changepoints
    profile = gap_profile(env, delta, windows)
    floor = profile.floor
    log_t = math.log(t)
    log_T = math.log(T)
    flags: list[str] = []

    eta_min_1 = 6.0 / (2.0 * log_t + 1.0)
    eta_min_2 = 8.0 / (2.0 * log_T + 1.0)
    for label, need in (("theorem1", eta_min_1), ("theorem2", eta_min_2)):
        if eta < need:
            message = f"{label}: eta={eta} below required {need:.6g}"
            if strict:
                raise EtaTooSmallError(message)
            flags.append(message)

    offenders = [(cp.index, i, float(cp.chg[i])) for cp in profile.changepoints for i in cp.tiny]
    if offenders:
        message = f"{len(offenders)} changepoint gap(s) below sqrt(e/T)={floor:.6g}"
        if strict:
            raise GapTooSmallError(message, offenders)
        flags.append(message)

    reports = [_hardness_at(cp, K) for cp in profile.changepoints]

    # optimality terms, summed over segments
    t1a = 0.0
    t2a = t2a_alt = t2b = 0.0
    c1 = c1_constant(gamma, 4)
    c1_alt = c1_constant(gamma, 3)
    k_log_k = (K * math.log(K)) ** 1.5 if K > 1 else 0.0
    for s in range(len(env.segments)):
        gaps = profile.opt[s]
        sub = gaps[gaps > 0]
        t1a += float(np.sum(6.0 * log_t / sub))
        closing = profile.changepoints[s].chg if s < G else None
        for i in range(K):
            d_opt = float(gaps[i])
            if d_opt < floor or (closing is not None and closing[i] < floor):
                continue
            base = 48.0 * K * d_opt * math.log(T / K) * k_log_k if K > 1 else 0.0
            t2a += c1 * base
            t2a_alt += c1_alt * base
            t2b += 16.0 * _pos_log(T * d_opt ** 2 / K) / d_opt

    t1b = t1c = t1c_alt = 0.0
    t2c = t2d = 0.0
    t1d = t2e = 0.0
    per_changepoint = []
    for cp, rep in zip(profile.changepoints, reports):
        for i in cp.detectable:
            d_chg = float(cp.chg[i])
            t1b += 16.0 * rep.h2 * log_t / d_chg
            t1c += 30.0 * K * rep.h2 * log_t / cp.threshold
            t1c_alt += (12.0 * K + 18.0) * rep.h2 * log_t / cp.threshold
            lg = _pos_log(T * d_chg ** 2 / K)
            t2c += 16.0 * rep.h2 * lg / d_chg
            t2d += 16.0 * K * rep.h2 * lg / cp.threshold
        if cp.undetectable:
            worst = max(float(cp.chg[i]) for i in cp.undetectable)
            t1d = max(t1d, worst * t)
            t2e = max(t2e, worst * T)
        per_changepoint.append({
            "index": cp.index,
            "time": cp.time,
            "window": cp.window,
            "threshold": cp.threshold,
            "chg_gaps": [float(v) for v in cp.chg],
            "detectable": list(cp.detectable),
            "undetectable": list(cp.undetectable),
            "below_floor": list(cp.tiny),
            "h1": rep.h1,
            "h2": rep.h2,
            "sandwich_holds": rep.sandwich_holds,
        })

    theorem1 = {
        "a": t1a, "b": t1b, "c": t1c, "d": t1d,
        "total": t1a + t1b + t1c + t1d,
        "c_alt_12k_18": t1c_alt,
        "eta_min": eta_min_1,
    }
    theorem2 = {
        "a": t2a, "b": t2b, "c": t2c, "d": t2d, "e": t2e,
        "total": t2a + t2b + t2c + t2d + t2e,
        "c1_exp4": c1,
        "c1_exp3": c1_alt,
        "a_with_c1_exp3": t2a_alt,
        "eta_min": eta_min_2,
    }

    pieces = max(G, 1)
    lower_dep = 0.0
    if G == 0:
        sub = profile.opt[0][profile.opt[0] > 0]
        h1 = float(np.sum(1.0 / sub ** 2)) if sub.size else 0.0
        if sub.size:
            lower_dep = float(np.sum(_pos_log(T / h1) / sub))
    else:
        for cp, rep in zip(profile.changepoints, reports):
            sub = cp.opt_before[cp.opt_before > 0]
            if sub.size and rep.h1 > 0:
                lower_dep += float(np.sum(_pos_log(T / (G * rep.h1)) / sub))
    theorem3 = {
        "gap_dependent": lower_dep,
        "gap_dependent_label": "up to constants",
        "gap_independent": math.sqrt(K * pieces * T) / 20.0,
    }
    corollary1 = {
        "ucbl_cpd": math.sqrt(pieces * T) * log_T,
        "impcpd": math.sqrt(pieces * T),
        "impcpd_constant": c1 * pieces ** 1.5 * K ** 4.5 * math.log(K) ** 2,
        "impcpd_constant_c1_exp3": c1_alt * pieces ** 1.5 * K ** 4.5 * math.log(K) ** 2,
    }
    return BoundReport(
        horizon=T, t=t, delta=delta, gamma=gamma, eta=eta,
        per_changepoint=per_changepoint,
        theorem1=theorem1, theorem2=theorem2, theorem3=theorem3, corollary1=corollary1,
        flags=flags, gap_offenders=offenders,
    )


@dataclass
class AssumptionCheck:
    name: str
    passed: bool
    offenders: list[tuple[int, ...]] = field(default_factory=list)
    detail: list[dict[str, Any]] = field(default_factory=list)


@dataclass
class AssumptionReport:
    global_changes: AssumptionCheck
    separated: AssumptionCheck
    isolated: AssumptionCheck
    tiny_gaps: list[tuple[int, int, float]]

    @property
    def passed(self) -> bool:
        return self.global_changes.passed and self.separated.passed and self.isolated.passed

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def validate_assumptions(
    env: Environment, delta: float, eta: float, windows: Sequence[int] | None = None,
) -> AssumptionReport:
    """Report-only check of the global, separation and isolation assumptions."""
    if not 0.0 < eta < 1.0:
        raise InvalidEtaError(f"eta must lie in (0, 1), got {eta}")
    profile = gap_profile(env, delta, windows)
    K = env.n_arms
    cps = profile.changepoints

    unchanged = [(cp.index, int(i)) for cp in cps for i in np.flatnonzero(cp.chg == 0.0)]
    global_check = AssumptionCheck("global", not unchanged, unchanged)

    late: list[tuple[int, ...]] = []
    margins = []
    for cp in cps:
        nxt = cps[cp.index + 1].time if cp.index + 1 < len(cps) else env.horizon + 1
        delay = oracle_delay_bound(cp.window, cp.threshold, delta, eta, K)
        budget = eta * (nxt - cp.time)
        margins.append({"index": cp.index, "delay_bound": delay, "budget": budget,
                        "margin": budget - delay})
        if delay > budget:
            late.append((cp.index,))
    separated = AssumptionCheck("separated", not late, late, margins)

    crowded: list[tuple[int, int]] = []
    for prev, cur in zip(cps, cps[1:]):
        missed_prev = set(prev.undetectable)
        missed_cur = set(cur.undetectable)
        crowded.extend((cur.index, i) for i in sorted(missed_prev & missed_cur))
    isolated = AssumptionCheck("isolated", not crowded, crowded)

    tiny = [(cp.index, i, float(cp.chg[i])) for cp in cps for i in cp.tiny if cp.chg[i] > 0]
    report = AssumptionReport(global_check, separated, isolated, tiny)
    for check in (global_check, separated, isolated):
        if not check.passed:
            logger.warning("assumption '%s' fails at %d place(s)", check.name, len(check.offenders))
    return report
