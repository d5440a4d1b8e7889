"""
Deep Q-learning pieces: action selection with skipping, targets, one update, target sync
"""

import logging
from typing import Optional

import numpy as np

from agent.config import AgentConfig
from agent.replay import ReplayBuffer, TransitionBatch
from core.errors import TrainingDivergenceError
from neural.network import QNetwork, backward_q, forward_q

logger = logging.getLogger(__name__)


def greedy_action(q_values: np.ndarray) -> int:
    """argmax with ties going to the lowest index"""
    return int(np.argmax(q_values))


def is_decision_step(t: int, K: int, prev_action: Optional[int]) -> bool:
    return t == 1 or prev_action is None or t % K == 0


def select_action(
    q_values: np.ndarray,
    t: int,
    epsilon: float,
    prev_action: Optional[int],
    K: int,
    rng: np.random.Generator,
    gate_exploration: bool = False,
) -> int:
    """Epsilon-greedy with action skipping

    t counts control steps from 1 inside the episode. The greedy choice is
    refreshed only when t mod K == 0 (and on the first step); otherwise the
    previous action repeats. Exploration is rolled every step unless
    gate_exploration restricts it to decision steps.
    """
    draw = rng.random()
    decide = is_decision_step(t, K, prev_action)
    if gate_exploration and not decide:
        return prev_action
    if draw < epsilon:
        return int(rng.integers(len(q_values)))
    if not decide:
        return prev_action
    return greedy_action(q_values)


def compute_targets(batch: TransitionBatch, target_net: QNetwork, gamma: float) -> np.ndarray:
    """y = r for terminal transitions, r + gamma * max_a' Q_target(next, a') otherwise"""
    q_next, _ = forward_q(target_net, batch.next_windows)
    bootstrap = batch.rewards + gamma * q_next.max(axis=1)
    return np.where(batch.terminals, batch.rewards, bootstrap)


def train_step(online_net: QNetwork, target_net: QNetwork, buffer: ReplayBuffer, optimizer, config: AgentConfig) -> Optional[float]:
    """One gradient step on the mean squared TD error; None when the buffer is too small"""
    if len(buffer) < config.batch_size:
        return None

    batch = buffer.sample(config.batch_size)
    y = compute_targets(batch, target_net, config.gamma)
    q, cache = forward_q(online_net, batch.windows)
    rows = np.arange(len(batch))
    residual = q[rows, batch.actions] - y
    loss = float(np.mean(residual * residual))
    if not np.isfinite(loss):
        raise TrainingDivergenceError(f"non-finite loss {loss}")

    # only the taken action's Q-value carries gradient
    dq = np.zeros_like(q)
    dq[rows, batch.actions] = 2.0 * residual / len(batch)
    grads = backward_q(online_net, cache, dq)
    online_net.apply_gradients(optimizer, grads)
    return loss


def sync_target(online_net: QNetwork, target_net: QNetwork) -> None:
    target_net.load_parameters(online_net.params)
