"""Configuration helper for loading environment variables."""
import os
from pathlib import Path
from dotenv import load_dotenv

from cpdbandit.helpers.errors import ConfigError

load_dotenv('.env', override=False)

_PACKAGE_DIR = Path(__file__).resolve().parent.parent


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("true", "1", "yes")


class Config:
    """Process-wide settings."""

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR: str = os.getenv("LOG_DIR", "logs")
    LOG_TO_FILE: bool = _flag("LOG_TO_FILE", "true")

    # Files
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "results")
    CONFIGS_DIR: str = os.getenv("CONFIGS_DIR", str(_PACKAGE_DIR / "configs"))

    # Runs
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "0"))
    DEFAULT_THREADS: int = int(os.getenv("DEFAULT_THREADS", "1"))
    SHOW_PROGRESS: bool = _flag("SHOW_PROGRESS", "true")

    # Runtime benchmark
    BENCH_REPEATS: int = int(os.getenv("BENCH_REPEATS", "5"))

    @classmethod
    def validate(cls) -> None:
        """Reject settings the runner cannot honour."""
        if cls.DEFAULT_THREADS < 1:
            raise ConfigError(f"DEFAULT_THREADS must be >= 1, got {cls.DEFAULT_THREADS}")
        if cls.BENCH_REPEATS < 5:
            raise ConfigError(f"BENCH_REPEATS must be >= 5, got {cls.BENCH_REPEATS}")
        if cls.DEFAULT_SEED < 0:
            raise ConfigError(f"DEFAULT_SEED must be >= 0, got {cls.DEFAULT_SEED}")
