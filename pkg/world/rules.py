"""
Task rules: heading error, reward shaping, termination and goal placement
"""

import logging
import math
from typing import Optional

import numpy as np

from core.errors import ConfigurationError, ContractViolationError, InvalidStateError
from world.geometry import surface_distance, wrap_to_pi
from world.types import GoalState, Pose2D, RewardConfig, RobotParams, Status, WorldConfig

logger = logging.getLogger(__name__)

N_ACTIONS = 5
ACTION_HEADING_STEP = math.pi / 8
TIME_EPS = 1e-9
MAX_GOAL_ATTEMPTS = 1000


def goal_distance(pose: Pose2D, goal: GoalState) -> float:
    return math.hypot(goal.position[0] - pose.x, goal.position[1] - pose.y)


def heading_error(pose: Pose2D, goal: GoalState) -> float:
    """Signed angle from the robot's heading to the bearing of the goal, 0 when on the goal"""
    dx, dy = goal.position[0] - pose.x, goal.position[1] - pose.y
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return wrap_to_pi(math.atan2(dy, dx) - pose.yaw)


def alignment_error(h: float, action_index: int) -> float:
    """Residual heading error after the action's nominal correction, scaled to [0, 2]"""
    return abs(wrap_to_pi(h - (action_index - 2) * ACTION_HEADING_STEP)) / (math.pi / 2)


def compute_reward(
    h: float,
    action_index: int,
    d_current: float,
    d_goal: float,
    status: Status,
    config: Optional[RewardConfig] = None,
    d_previous: Optional[float] = None,
    step_length: float = 0.03,
) -> float:
    config = config or RewardConfig()
    if not d_goal > 0:
        raise InvalidStateError(f"initial goal distance must be positive, got {d_goal}")
    if action_index not in range(N_ACTIONS):
        raise ContractViolationError(f"action index {action_index} outside 0..{N_ACTIONS - 1}")

    if status == Status.COLLISION:
        return float(config.collision_penalty)
    if status == Status.GOAL_REACHED:
        return float(config.goal_reward)

    if config.mode == "progress":
        if d_previous is None:
            raise ContractViolationError("progress reward needs the previous goal distance")
        return config.progress_gain * (d_previous - d_current) / step_length

    r_theta = 5.0 * (1.0 - alignment_error(h, action_index))
    r_d = 2.0 * (d_current / d_goal)
    return r_theta * r_d


def check_termination(pose: Pose2D, world: WorldConfig, goal: GoalState, elapsed_sim_time: float, robot: RobotParams) -> Status:
    """Collision beats goal arrival, which beats timeout"""
    if surface_distance(pose.x, pose.y, world) < robot.body_radius:
        return Status.COLLISION
    if goal_distance(pose, goal) < world.goal_radius:
        return Status.GOAL_REACHED
    if elapsed_sim_time >= world.episode_time_s - TIME_EPS:
        return Status.TIMEOUT
    return Status.RUNNING


def goal_is_feasible(x: float, y: float, world: WorldConfig, robot_pose: Pose2D) -> bool:
    xmin, ymin, xmax, ymax = world.arena_bounds
    c = world.goal_clearance
    if not (xmin + c <= x <= xmax - c and ymin + c <= y <= ymax - c):
        return False
    if surface_distance(x, y, world) < c:
        return False
    return math.hypot(x - robot_pose.x, y - robot_pose.y) >= world.goal_min_robot_distance


def spawn_goal(rng: np.random.Generator, world: WorldConfig, robot_pose: Pose2D) -> GoalState:
    """Rejection-sample a goal uniformly over the free, clearance-respecting part of the arena"""
    xmin, ymin, xmax, ymax = world.arena_bounds
    c = world.goal_clearance
    if xmax - xmin <= 2 * c or ymax - ymin <= 2 * c:
        raise ConfigurationError("arena is too small for the goal clearance")

    for _ in range(MAX_GOAL_ATTEMPTS):
        x = float(rng.uniform(xmin + c, xmax - c))
        y = float(rng.uniform(ymin + c, ymax - c))
        if goal_is_feasible(x, y, world, robot_pose):
            distance = math.hypot(x - robot_pose.x, y - robot_pose.y)
            return GoalState(position=(x, y), initial_distance=distance)

    logger.error(f"No feasible goal after {MAX_GOAL_ATTEMPTS} attempts")
    raise ConfigurationError(f"could not place a goal in {MAX_GOAL_ATTEMPTS} attempts; the arena has no free region")
