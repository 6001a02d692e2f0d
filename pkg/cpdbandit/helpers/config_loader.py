"""Helper for resolving experiment config files from the configs folder."""
import json
from pathlib import Path
from typing import Any
import logging

from cpdbandit.helpers.config import Config
from cpdbandit.helpers.errors import ConfigError

logger = logging.getLogger(__name__)


class ConfigLoader:
    """Resolves a --config argument to a JSON document.

    The argument is either a path to a file or the stem of a config shipped
    in the configs directory (``expt1`` -> ``configs/expt1.json``).
    """

    def __init__(self, configs_dir: str | None = None):
        self.configs_dir = Path(configs_dir or Config.CONFIGS_DIR)

    def resolve(self, name_or_path: str) -> Path:
        candidate = Path(name_or_path)
        if candidate.is_file():
            return candidate
        packaged = self.configs_dir / f"{name_or_path}.json"
        if packaged.is_file():
            return packaged
        known = ", ".join(self.list_configs()) or "none"
        raise ConfigError(f"Config not found: {name_or_path} (packaged: {known})")

    def load(self, name_or_path: str) -> tuple[dict[str, Any], Path]:
        """Load a config; returns the parsed document and the file it came from."""
        path = self.resolve(name_or_path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        logger.info(f"Loaded config from {path}")
        return document, path

    def list_configs(self) -> list[str]:
        """List all packaged config names."""
        if not self.configs_dir.exists():
            return []
        return sorted(p.stem for p in self.configs_dir.glob("*.json"))
