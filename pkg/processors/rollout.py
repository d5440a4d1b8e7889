"""
Single greedy episode recorded step by step (trajectory.csv)
"""

import logging
import math
from typing import Optional

import numpy as np
import pandas as pd

from agent.training import Agent, run_episode
from core.seeding import ROLLOUT_STREAM, derive_rng
from neural.checkpoint import Checkpoint, atomic_write_text
from processors.evaluation import checkpoint_variant, evaluation_agent_config

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = [
    't', 'x', 'y', 'yaw', 'action', 'reward', 'D_c', 'min_scan', 'status', 'goal_x', 'goal_y',
]


def rollout(checkpoint: Checkpoint, experiment, seed: Optional[int] = None) -> pd.DataFrame:
    """One greedy episode; row t holds the state after the t-th control step"""
    seed = experiment.seed if seed is None else seed
    variant = checkpoint_variant(checkpoint, experiment.variant)
    agent = Agent(checkpoint.network.copy(), evaluation_agent_config(experiment.agent, checkpoint), variant, learn=False)
    env = experiment.make_env(respawn=False)
    rows = []

    def record_step(t, action, outcome):
        pose, goal = env.pose, env.goal
        rows.append({
            't': t,
            'x': pose.x,
            'y': pose.y,
            'yaw': pose.yaw,
            'action': action,
            'reward': outcome.reward,
            'D_c': math.hypot(goal.position[0] - pose.x, goal.position[1] - pose.y),
            'min_scan': float(np.min(env.scan.ranges)),
            'status': outcome.status.value,
            'goal_x': goal.position[0],
            'goal_y': goal.position[1],
        })

    record = run_episode(env, agent, derive_rng(seed, ROLLOUT_STREAM), epsilon=0.0, step_callback=record_step)
    logger.info(f"Rollout ended with {record.outcome} after {record.steps} steps")
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)


def write_trajectory(path: str, trajectory: pd.DataFrame) -> str:
    atomic_write_text(path, trajectory.to_csv(index=False, lineterminator='\n'))
    logger.info(f"Trajectory saved to: {path}")
    return path


def read_trajectory(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision='round_trip')
