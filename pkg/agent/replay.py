"""
Fixed-capacity FIFO replay memory
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from core.errors import ContractViolationError, DimensionError


@dataclass(frozen=True)
class Transition:
    window: np.ndarray
    action: int
    reward: float
    next_window: np.ndarray
    terminal: bool


@dataclass(frozen=True)
class TransitionBatch:
    windows: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_windows: np.ndarray
    terminals: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    @classmethod
    def from_transitions(cls, transitions: List[Transition]) -> "TransitionBatch":
        return cls(
            windows=np.stack([t.window for t in transitions]),
            actions=np.array([t.action for t in transitions], dtype=np.int64),
            rewards=np.array([t.reward for t in transitions], dtype=np.float64),
            next_windows=np.stack([t.next_window for t in transitions]),
            terminals=np.array([t.terminal for t in transitions], dtype=bool),
        )


class ReplayBuffer:
    """Ring buffer; once full, every push overwrites the oldest transition"""

    def __init__(self, capacity: int, rng: Optional[np.random.Generator] = None):
        if capacity < 1:
            raise ContractViolationError("replay capacity must be >= 1")
        self.capacity = capacity
        self.rng = rng or np.random.default_rng(0)
        self.size = 0
        self.position = 0
        self._windows = None

    def __len__(self) -> int:
        return self.size

    def _allocate(self, window_shape) -> None:
        self._windows = np.zeros((self.capacity,) + window_shape)
        self._next_windows = np.zeros((self.capacity,) + window_shape)
        self._actions = np.zeros(self.capacity, dtype=np.int64)
        self._rewards = np.zeros(self.capacity)
        self._terminals = np.zeros(self.capacity, dtype=bool)

    def push(self, transition: Transition) -> None:
        window = np.asarray(transition.window, dtype=np.float64)
        if self._windows is None:
            self._allocate(window.shape)
        if window.shape != self._windows.shape[1:] or np.shape(transition.next_window) != window.shape:
            raise DimensionError(f"transition windows must have shape {self._windows.shape[1:]}")
        i = self.position
        self._windows[i] = window
        self._next_windows[i] = transition.next_window
        self._actions[i] = transition.action
        self._rewards[i] = transition.reward
        self._terminals[i] = transition.terminal
        self.position = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def _batch(self, idx: np.ndarray) -> TransitionBatch:
        return TransitionBatch(
            windows=self._windows[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_windows=self._next_windows[idx],
            terminals=self._terminals[idx],
        )

    def sample(self, batch_size: int) -> TransitionBatch:
        """Uniform mini-batch, without replacement inside the batch"""
        if batch_size > self.size:
            raise ContractViolationError(f"cannot sample {batch_size} transitions from {self.size}")
        return self._batch(self.rng.choice(self.size, size=batch_size, replace=False))

    def transitions(self) -> List[Transition]:
        """Stored transitions, oldest first"""
        start = self.position if self.size == self.capacity else 0
        order = [(start + k) % self.capacity for k in range(self.size)]
        return [
            Transition(self._windows[i].copy(), int(self._actions[i]), float(self._rewards[i]),
                       self._next_windows[i].copy(), bool(self._terminals[i]))
            for i in order
        ]
