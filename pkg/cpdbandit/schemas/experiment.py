"""Pydantic models for experiment config files."""
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from cpdbandit.helpers.config import Config
from cpdbandit.helpers.errors import ConfigError
from cpdbandit.services.policies.registry import POLICY_BUILDERS


class SegmentSpec(BaseModel):
    start: int = Field(ge=1)
    means: list[float]


class RewardModelSpec(BaseModel):
    kind: Literal["bernoulli", "gaussian_clipped"] = "bernoulli"
    sigma: Optional[float] = None

    @model_validator(mode="after")
    def _sigma_for_gaussian(self) -> "RewardModelSpec":
        if self.kind == "gaussian_clipped" and (self.sigma is None or self.sigma <= 0):
            raise ValueError("gaussian_clipped rewards need sigma > 0")
        return self


class EnvironmentSpec(BaseModel):
    horizon: int = Field(ge=0)
    segments: Optional[list[SegmentSpec]] = None
    csv: Optional[str] = None
    reward_model: RewardModelSpec = RewardModelSpec()

    @model_validator(mode="after")
    def _one_source(self) -> "EnvironmentSpec":
        if (self.segments is None) == (self.csv is None):
            raise ValueError("environment needs exactly one of 'segments' or 'csv'")
        return self


class PolicySpec(BaseModel):
    name: str
    params: dict[str, Any] = Field(default_factory=dict)
    label: Optional[str] = None

    @field_validator("name")
    @classmethod
    def _known(cls, value: str) -> str:
        if value.lower() not in POLICY_BUILDERS:
            raise ValueError(f"unknown policy '{value}' (known: {', '.join(sorted(POLICY_BUILDERS))})")
        return value.lower()

    @property
    def display_label(self) -> str:
        return self.label or self.name


class EtaSweepSpec(BaseModel):
    etas: list[float] = Field(min_length=1)
    base_cost: int = Field(gt=0)
    rows: Optional[list[list[float]]] = None


class BenchSpec(BaseModel):
    horizons: list[int] = Field(min_length=1)
    repeats: int = Field(default=5, ge=5)


class BoundsSpec(BaseModel):
    delta: Optional[float] = Field(default=None, gt=0, lt=1)
    gamma: float = Field(default=0.05, gt=0, le=1)
    eta: float = Field(default=0.5, gt=0, lt=1)
    t: Optional[int] = Field(default=None, ge=2)
    strict: bool = False


class ExperimentConfig(BaseModel):
    name: Optional[str] = None
    environment: EnvironmentSpec
    policies: list[PolicySpec] = Field(min_length=1)
    replications: int = Field(default=1, ge=1)
    seed: int = Field(default_factory=lambda: Config.DEFAULT_SEED, ge=0)
    output_dir: Optional[str] = None
    eta_sweep: Optional[EtaSweepSpec] = None
    bench: Optional[BenchSpec] = None
    bounds: BoundsSpec = BoundsSpec()

    @model_validator(mode="after")
    def _unique_labels(self) -> "ExperimentConfig":
        labels = [p.display_label for p in self.policies]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise ValueError(f"policy labels must be unique, repeated: {dupes}")
        return self


def parse_experiment_config(document: dict[str, Any], source: Path | None = None) -> ExperimentConfig:
    """Validate a loaded JSON document; a relative csv path is resolved against the config's folder."""
    try:
        config = ExperimentConfig.model_validate(document)
    except ValidationError as e:
        where = f"{source}: " if source else ""
        raise ConfigError(f"{where}invalid experiment config\n{e}") from e
    if config.environment.csv and source is not None:
        csv_path = Path(config.environment.csv)
        if not csv_path.is_absolute():
            config.environment.csv = str((source.parent / csv_path).resolve())
    return config
