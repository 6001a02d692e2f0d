"""Confidence radii for rewards bounded in [0, 1].

Four families: the Laplace (method of mixtures) radius, which depends on the
pull count only, the union-bound and peeling radii, which also depend on the
elapsed time, and the phase radius used by ImpCPD. All logs are natural.

The scalar functions validate their arguments. The ``*_array`` variants take
numpy count arrays and skip validation; scans call them in their inner loop.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from cpdbandit.helpers.errors import (
    ConfigError,
    DegenerateLogError,
    InvalidAlphaError,
    InvalidCountError,
    InvalidDeltaError,
)


class RadiusFamily(str, Enum):
    LAPLACE = "laplace"
    UNION = "union"
    PEELING = "peeling"
    PHASE = "phase"


@dataclass(frozen=True)
class RadiusKind:
    """A radius family plus its parameters (alpha for peeling; psi, alpha for phase)."""
    family: RadiusFamily
    alpha: float | None = None
    psi: float | None = None

    def __post_init__(self):
        if self.family is RadiusFamily.PEELING and (self.alpha is None or self.alpha <= 1):
            raise InvalidAlphaError(f"peeling needs alpha > 1, got {self.alpha}")
        if self.family is RadiusFamily.PHASE:
            if self.psi is None or self.psi <= 0:
                raise ConfigError(f"phase radius needs psi > 0, got {self.psi}")
            if self.alpha is None or self.alpha <= 0:
                raise InvalidAlphaError(f"phase radius needs alpha > 0, got {self.alpha}")

    @classmethod
    def laplace(cls) -> "RadiusKind":
        return cls(RadiusFamily.LAPLACE)

    @classmethod
    def union(cls) -> "RadiusKind":
        return cls(RadiusFamily.UNION)

    @classmethod
    def peeling(cls, alpha: float = 1.5) -> "RadiusKind":
        return cls(RadiusFamily.PEELING, alpha=alpha)

    @classmethod
    def phase(cls, psi: float, alpha: float = 1.5) -> "RadiusKind":
        return cls(RadiusFamily.PHASE, alpha=alpha, psi=psi)

    @classmethod
    def from_name(cls, name: str, alpha: float | None = None) -> "RadiusKind":
        """Scan families selectable by name in configs and on the command line."""
        family = RadiusFamily(name.lower())
        if family is RadiusFamily.LAPLACE:
            return cls.laplace()
        if family is RadiusFamily.UNION:
            return cls.union()
        if family is RadiusFamily.PEELING:
            return cls.peeling(1.5 if alpha is None else alpha)
        raise ConfigError("the phase radius is built by ImpCPD from T and K, not by name")


def _check_count(n: int) -> None:
    if n < 1:
        raise InvalidCountError(f"observation count must be >= 1, got {n}")


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise InvalidDeltaError(f"delta must lie in (0, 1), got {delta}")


def laplace_radius(n: int, delta: float) -> float:
    """sqrt((1 + 1/n) * ln(sqrt(n + 1) / delta) / (2n))."""
    _check_count(n)
    _check_delta(delta)
    return math.sqrt((1.0 + 1.0 / n) * (0.5 * math.log(n + 1.0) - math.log(delta)) / (2.0 * n))


def union_radius(n: int, t: int, delta: float) -> float:
    """sqrt(ln(4 t^2 / delta) / (2n))."""
    _check_count(n)
    _check_delta(delta)
    if t < 1:
        raise InvalidCountError(f"t must be >= 1, got {t}")
    return math.sqrt(math.log(4.0 * t * t / delta) / (2.0 * n))


def peeling_radius(n: int, t: int, delta: float, alpha: float) -> float:
    """sqrt((alpha / n) * ln(ceil(ln(t) / alpha) / delta))."""
    if alpha <= 1:
        raise InvalidAlphaError(f"alpha must be > 1, got {alpha}")
    _check_count(n)
    _check_delta(delta)
    if t < 2:
        raise InvalidCountError(f"peeling needs t >= 2, got {t}")
    shells = math.ceil(math.log(t) / alpha)
    return math.sqrt((alpha / n) * math.log(shells / delta))


def phase_radius(n: int, eps: float, psi: float, alpha: float) -> float:
    """sqrt(alpha * ln(psi * eps^2) / (2n))."""
    _check_count(n)
    log_term = _phase_log(eps, psi)
    return math.sqrt(alpha * log_term / (2.0 * n))


def _phase_log(eps: float, psi: float) -> float:
    arg = psi * eps * eps
    if arg <= 1.0:
        raise DegenerateLogError(f"psi * eps^2 = {arg:.6g} <= 1; horizon too short for this arm count")
    return math.log(arg)


# Vectorised forms. n is an integer array with every entry >= 1.

def laplace_radius_array(n: np.ndarray, delta: float) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return np.sqrt((1.0 + 1.0 / n) * (0.5 * np.log(n + 1.0) - math.log(delta)) / (2.0 * n))


def union_radius_array(n: np.ndarray, t: int, delta: float) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return np.sqrt(math.log(4.0 * t * t / delta) / (2.0 * n))


def peeling_radius_array(n: np.ndarray, t: int, delta: float, alpha: float) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    shells = math.ceil(math.log(max(t, 2)) / alpha)
    return np.sqrt((alpha / n) * math.log(shells / delta))


def phase_radius_array(n: np.ndarray, eps: float, psi: float, alpha: float) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return np.sqrt(alpha * _phase_log(eps, psi) / (2.0 * n))


def radius_array(kind: RadiusKind, n: np.ndarray, *, delta: float | None = None,
                 t: int | None = None, eps: float | None = None) -> np.ndarray:
    """Dispatch on the family; each family reads only the arguments it needs."""
    if kind.family is RadiusFamily.LAPLACE:
        return laplace_radius_array(n, delta)
    if kind.family is RadiusFamily.UNION:
        return union_radius_array(n, t, delta)
    if kind.family is RadiusFamily.PEELING:
        return peeling_radius_array(n, t, delta, kind.alpha)
    return phase_radius_array(n, eps, kind.psi, kind.alpha)


def radius(kind: RadiusKind, n: int, *, delta: float | None = None,
           t: int | None = None, eps: float | None = None) -> float:
    """Validated scalar radius for any family."""
    if kind.family is RadiusFamily.LAPLACE:
        return laplace_radius(n, delta)
    if kind.family is RadiusFamily.UNION:
        return union_radius(n, t, delta)
    if kind.family is RadiusFamily.PEELING:
        return peeling_radius(n, t, delta, kind.alpha)
    return phase_radius(n, eps, kind.psi, kind.alpha)
