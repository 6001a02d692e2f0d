"""Exception hierarchy shared by every module."""


class CpdBanditError(Exception):
    """Base class for all library errors."""


class ConfigError(CpdBanditError, ValueError):
    """Invalid process settings or experiment config."""


# env

class EmptySpecError(CpdBanditError, ValueError):
    pass


class UnsortedSegmentsError(CpdBanditError, ValueError):
    pass


class MeanOutOfRangeError(CpdBanditError, ValueError):
    pass


class RaggedRowsError(CpdBanditError, ValueError):
    pass


class StartNotOneError(CpdBanditError, ValueError):
    pass


class TimeOutOfRangeError(CpdBanditError, ValueError):
    pass


class ArmOutOfRangeError(CpdBanditError, ValueError):
    pass


# confbounds

class InvalidCountError(CpdBanditError, ValueError):
    pass


class InvalidDeltaError(CpdBanditError, ValueError):
    pass


class InvalidAlphaError(CpdBanditError, ValueError):
    pass


class DegenerateLogError(CpdBanditError, ValueError):
    """psi * eps^2 <= 1: the horizon is too short for the arm count."""


# detect / policies

class ValueOutOfRangeError(CpdBanditError, ValueError):
    pass


class NoObservationsError(CpdBanditError, ValueError):
    pass


# analysis

class InvalidGapError(CpdBanditError, ValueError):
    pass


class InvalidEtaError(CpdBanditError, ValueError):
    pass


class LastChangepointError(CpdBanditError, ValueError):
    pass


class EtaTooSmallError(CpdBanditError, ValueError):
    pass


class GapTooSmallError(CpdBanditError, ValueError):
    def __init__(self, message: str, offenders: list[tuple[int, int, float]]):
        super().__init__(message)
        self.offenders = offenders


# harness

class ParseError(CpdBanditError, ValueError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class InconsistentTraceError(CpdBanditError):
    """The per-step regret sum and the gap decomposition disagree."""
