import os
import sys

import numpy as np
import pytest

# Ensure we can import from the project
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from core.config_manager import ConfigManager  # noqa: E402
from world.types import Pose2D, RobotParams, WorldConfig  # noqa: E402


@pytest.fixture
def world():
    return WorldConfig()


@pytest.fixture
def robot():
    return RobotParams()


@pytest.fixture
def origin():
    return Pose2D(0.0, 0.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_overrides(tmp_path):
    return {
        "network.tdl_units": "8",
        "network.gru_units": "8",
        "network.fc1_units": "8",
        "agent.batch_size": "8",
        "agent.learning_start": "8",
        "agent.replay_capacity": "500",
        "agent.max_steps_per_episode": "40",
        "agent.max_episodes": "3",
        "agent.target_update_interval": "50",
        "experiment.milestones": "2",
        "experiment.eval_episodes": "4",
        "experiment.seed": "5",
        "experiment.output_dir": str(tmp_path / "run"),
        "experiment.log_every": "0",
    }


@pytest.fixture
def small_experiment(small_overrides):
    """Tiny recurrent experiment that trains a few episodes in seconds"""
    return ConfigManager(overrides=small_overrides).experiment_config()
