"""
Deep Q-learning with a GRU front end and action skipping
"""

from .config import AgentConfig, AgentVariant, epsilon_for_episode
from .dqn import compute_targets, greedy_action, select_action, sync_target, train_step
from .replay import ReplayBuffer, Transition, TransitionBatch
from .training import Agent, TrainingResult, run_episode, train

__all__ = [
    'AgentConfig', 'AgentVariant', 'epsilon_for_episode',
    'compute_targets', 'greedy_action', 'select_action', 'sync_target', 'train_step',
    'ReplayBuffer', 'Transition', 'TransitionBatch',
    'Agent', 'TrainingResult', 'run_episode', 'train',
]
