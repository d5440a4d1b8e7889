"""
Agent hyperparameters and the three compared agent variants
"""

from dataclasses import dataclass
from enum import Enum
from typing import List

from core.errors import ConfigurationError
from neural.network import FEEDFORWARD, RECURRENT


class AgentVariant(str, Enum):
    DQN_ALONE = "dqn"
    DQN_GRU = "dqn-gru"
    DQN_GRU_SKIP = "dqn-gru-skip"

    @property
    def family(self) -> str:
        return FEEDFORWARD if self is AgentVariant.DQN_ALONE else RECURRENT

    @property
    def default_action_skip(self) -> int:
        return 10 if self is AgentVariant.DQN_GRU_SKIP else 1

    @classmethod
    def parse(cls, text: str) -> "AgentVariant":
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise ConfigurationError(f"unknown variant '{text}' (expected one of: {choices})")


@dataclass(frozen=True)
class AgentConfig:
    gamma: float = 0.99
    batch_size: int = 64
    target_update_interval: int = 2000
    epsilon_start: float = 1.0
    epsilon_decay: float = 0.99
    epsilon_min: float = 0.05
    action_skip: int = 10
    replay_capacity: int = 100000
    learning_start: int = 64
    train_every: int = 1
    max_episodes: int = 3000
    max_steps_per_episode: int = 250
    max_total_steps: int = 0
    skip_gates_exploration: bool = False
    optimizer: str = "adam"
    learning_rate: float = 1e-3

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigurationError("; ".join(problems))

    def problems(self) -> List[str]:
        issues = []
        if not 0 < self.gamma < 1:
            issues.append("gamma must lie in (0, 1)")
        if not 0 <= self.epsilon_min <= self.epsilon_start <= 1:
            issues.append("need 0 <= epsilon_min <= epsilon_start <= 1")
        if not 0 < self.epsilon_decay <= 1:
            issues.append("epsilon_decay must lie in (0, 1]")
        if self.action_skip < 1:
            issues.append("action_skip must be >= 1")
        if self.batch_size < 1 or self.batch_size > self.replay_capacity:
            issues.append("need 1 <= batch_size <= replay_capacity")
        for name in ("target_update_interval", "train_every", "max_episodes", "max_steps_per_episode"):
            if getattr(self, name) < 1:
                issues.append(f"{name} must be >= 1")
        if self.learning_start < 0 or self.max_total_steps < 0:
            issues.append("learning_start and max_total_steps must be >= 0")
        if self.optimizer not in ("adam", "sgd"):
            issues.append(f"unknown optimizer '{self.optimizer}'")
        if not self.learning_rate > 0:
            issues.append("learning_rate must be > 0")
        return issues


def epsilon_for_episode(config: AgentConfig, episode: int) -> float:
    """max(epsilon_min, epsilon_start * decay ** episode), episode counted from 0"""
    return max(config.epsilon_min, config.epsilon_start * config.epsilon_decay ** episode)
