import os

os.environ.setdefault("LOG_TO_FILE", "false")
os.environ.setdefault("SHOW_PROGRESS", "false")

import pytest  # noqa: E402

from cpdbandit.schemas.experiment import ExperimentConfig  # noqa: E402
from cpdbandit.services.env import (  # noqa: E402
    RewardModel,
    build_environment,
    experiment1_environment,
)

EXPT1_ROWS = [
    (0.1, 0.2, 0.9),
    (0.4, 0.9, 0.1),
    (0.5, 0.1, 0.2),
    (0.2, 0.2, 0.3),
]


@pytest.fixture
def expt1_env():
    return experiment1_environment()


@pytest.fixture
def stationary_env():
    return build_environment([(1, (0.5, 0.5))], 100)


@pytest.fixture
def deterministic_env():
    """Two arms paying exactly 1 and 0, no changepoints."""
    return build_environment([(1, (1.0, 0.0))], 10, RewardModel.bernoulli())


def make_config(segments, horizon, policies, replications=1, seed=0, **extra) -> ExperimentConfig:
    return ExperimentConfig.model_validate({
        "name": "test",
        "environment": {
            "horizon": horizon,
            "segments": [{"start": s, "means": list(m)} for s, m in segments],
        },
        "policies": policies,
        "replications": replications,
        "seed": seed,
        **extra,
    })


@pytest.fixture
def config_factory():
    return make_config
