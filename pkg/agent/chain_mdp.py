"""
Deterministic 5-state chain with a tabular value-iteration oracle

States 0..4 lie on a line; state 4 is the goal. Action a moves the agent by
a - 2 cells, clipped to the chain. Landing on the goal pays 1 and ends the
episode; every other transition pays 0. Observations are one-hot vectors, so
the fixture plugs into the same training loop as the navigation environment.
"""

from typing import Optional, Tuple

import numpy as np

from world.types import Observation, Status, StepOutcome


class ChainEnv:
    def __init__(self, n_states: int = 5, n_actions: int = 5, goal_reward: float = 1.0, max_steps: int = 20):
        self.n_states = n_states
        self.n_actions = n_actions
        self.goal_reward = goal_reward
        self.max_steps = max_steps
        self.goal = n_states - 1
        self.state = 0
        self.steps = 0
        self.status = Status.TIMEOUT
        self.first_goal_time: Optional[float] = None

    @property
    def observation_size(self) -> int:
        return self.n_states

    @property
    def elapsed(self) -> float:
        return float(self.steps)

    @property
    def done(self) -> bool:
        return self.status != Status.RUNNING

    @property
    def terminal(self) -> bool:
        return self.status == Status.GOAL_REACHED

    def one_hot(self, state: int) -> np.ndarray:
        v = np.zeros(self.n_states)
        v[state] = 1.0
        return v

    def transition(self, state: int, action: int) -> Tuple[int, float, bool]:
        shift = action - self.n_actions // 2
        nxt = min(max(state + shift, 0), self.n_states - 1)
        if nxt == self.goal:
            return nxt, self.goal_reward, True
        return nxt, 0.0, False

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        # uniform over non-goal states so every state keeps being visited
        self.state = int(rng.integers(self.n_states - 1))
        self.steps = 0
        self.status = Status.RUNNING
        self.first_goal_time = None
        return self.one_hot(self.state)

    def step(self, action: int) -> StepOutcome:
        self.state, reward, terminal = self.transition(self.state, action)
        self.steps += 1
        if terminal:
            self.status = Status.GOAL_REACHED
            self.first_goal_time = self.elapsed
        elif self.steps >= self.max_steps:
            self.status = Status.TIMEOUT
        return StepOutcome(reward=reward, status=Status.GOAL_REACHED if terminal else self.status, observation=Observation(self.one_hot(self.state)))


def value_iteration(env: ChainEnv, gamma: float, tol: float = 1e-12, max_iter: int = 10000) -> np.ndarray:
    """Optimal action values Q*[state, action]; rows of terminal states stay zero"""
    q = np.zeros((env.n_states, env.n_actions))
    for _ in range(max_iter):
        v = q.max(axis=1)
        v[env.goal] = 0.0
        new_q = np.zeros_like(q)
        for s in range(env.n_states):
            if s == env.goal:
                continue
            for a in range(env.n_actions):
                nxt, reward, terminal = env.transition(s, a)
                new_q[s, a] = reward + (0.0 if terminal else gamma * v[nxt])
        if np.max(np.abs(new_q - q)) < tol:
            return new_q
        q = new_q
    return q


def optimal_actions(q_star: np.ndarray, state: int, tol: float = 1e-9) -> set:
    row = q_star[state]
    return {int(a) for a in np.flatnonzero(row >= row.max() - tol)}
