"""Logging setup for the CLI. Library modules only call logging.getLogger(__name__)."""
import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from cpdbandit.helpers.config import Config

FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_initialized = False


def log_file_path() -> Path:
    # pid keeps concurrent invocations from truncating each other's file
    timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
    return Path(Config.LOG_DIR) / f"{timestamp}_{os.getpid()}_cpdbandit.log"


def _init_root_logging() -> None:
    """Configure the root logger once: DEBUG to a file, INFO to stderr."""
    global _initialized
    if _initialized:
        return
    _initialized = True

    root = logging.getLogger()
    root.setLevel(getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO))
    fmt = logging.Formatter(FORMAT)

    if Config.LOG_TO_FILE:
        path = log_file_path()
        path.parent.mkdir(parents=True, exist_ok=True)
        fh = logging.FileHandler(str(path), mode="w", encoding="utf-8")
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(fmt)
        root.addHandler(fh)

    # stdout carries command output (bounds prints JSON)
    ch = logging.StreamHandler(sys.stderr)
    ch.setLevel(logging.INFO)
    ch.setFormatter(fmt)
    root.addHandler(ch)

    # numpy overflow and joblib worker warnings end up in the same log
    logging.captureWarnings(True)


def setup_logger(name: str = __name__) -> logging.Logger:
    """Return a named logger, ensuring root handlers are configured."""
    _init_root_logging()
    return logging.getLogger(name)
