"""
Goal-reaching navigation environment

One instance owns its pose, goal, clock and random generator. Instances share
nothing, so several can run side by side in different threads or processes.
"""

import logging
import math
from typing import Optional

import numpy as np

from core.errors import ConfigurationError, ContractViolationError
from world.geometry import inside_arena, step_kinematics, surface_distance
from world.lidar import cast_lidar
from world.rules import check_termination, compute_reward, goal_distance, heading_error, spawn_goal
from world.types import (
    GoalState,
    LidarScan,
    Observation,
    Pose2D,
    RewardConfig,
    RobotParams,
    Status,
    StepOutcome,
    WorldConfig,
)

logger = logging.getLogger(__name__)

SPAWN_MARGIN = 0.1
MAX_SPAWN_ATTEMPTS = 1000


def build_observation(scan: LidarScan, pose: Pose2D, goal: GoalState, world: WorldConfig) -> Observation:
    """24 normalised ranges, heading error / pi, goal distance / arena diagonal"""
    ranges = np.clip(scan.ranges / world.lidar_max_range, 0.0, 1.0)
    h = heading_error(pose, goal) / math.pi
    d = min(goal_distance(pose, goal) / world.diagonal, 1.0)
    return Observation(values=np.concatenate([ranges, [h, d]]))


class NavigationEnv:
    def __init__(
        self,
        world: Optional[WorldConfig] = None,
        robot: Optional[RobotParams] = None,
        reward: Optional[RewardConfig] = None,
        respawn: bool = True,
        random_spawn: bool = False,
    ):
        self.world = world or WorldConfig()
        self.robot = robot or RobotParams()
        self.reward_config = reward or RewardConfig()
        self.respawn = respawn
        self.random_spawn = random_spawn

        self.rng: Optional[np.random.Generator] = None
        self.pose: Optional[Pose2D] = None
        self.goal: Optional[GoalState] = None
        self.scan: Optional[LidarScan] = None
        self.status = Status.TIMEOUT
        self.steps = 0
        self.goals_reached = 0
        self.first_goal_time: Optional[float] = None

    @property
    def observation_size(self) -> int:
        return self.world.observation_size

    @property
    def n_actions(self) -> int:
        return len(self.robot.angular_velocities)

    @property
    def elapsed(self) -> float:
        return self.steps * self.robot.control_dt

    @property
    def done(self) -> bool:
        return self.status != Status.RUNNING

    @property
    def terminal(self) -> bool:
        """True when the last transition ended the task (timeouts are truncations)"""
        return self.status in (Status.COLLISION, Status.GOAL_REACHED)

    def _start_pose(self) -> Pose2D:
        xmin, ymin, xmax, ymax = self.world.arena_bounds
        clearance = self.robot.body_radius + SPAWN_MARGIN
        if not self.random_spawn:
            pose = Pose2D((xmin + xmax) / 2.0, (ymin + ymax) / 2.0, 0.0)
            if surface_distance(pose.x, pose.y, self.world) < clearance:
                raise ConfigurationError("the arena centre is blocked; enable random spawn or move the obstacles")
            return pose

        for _ in range(MAX_SPAWN_ATTEMPTS):
            x = float(self.rng.uniform(xmin + clearance, xmax - clearance))
            y = float(self.rng.uniform(ymin + clearance, ymax - clearance))
            yaw = float(self.rng.uniform(-math.pi, math.pi))
            if surface_distance(x, y, self.world) >= clearance:
                return Pose2D(x, y, yaw)
        raise ConfigurationError(f"no free spawn pose after {MAX_SPAWN_ATTEMPTS} attempts")

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self.rng = rng
        self.pose = self._start_pose()
        self.goal = spawn_goal(self.rng, self.world, self.pose)
        self.scan = cast_lidar(self.pose, self.world)
        self.status = Status.RUNNING
        self.steps = 0
        self.goals_reached = 0
        self.first_goal_time = None
        return self.observe().values

    def observe(self) -> Observation:
        return build_observation(self.scan, self.pose, self.goal, self.world)

    def step(self, action_index: int) -> StepOutcome:
        if self.status != Status.RUNNING:
            raise ContractViolationError(f"episode already ended with status '{self.status.value}'")
        if action_index not in range(self.n_actions):
            raise ContractViolationError(f"action index {action_index} outside 0..{self.n_actions - 1}")

        d_previous = goal_distance(self.pose, self.goal)
        self.pose = step_kinematics(
            self.pose, self.robot.linear_velocity, self.robot.angular_velocities[action_index], self.robot.control_dt
        )
        self.steps += 1

        if inside_arena(self.pose.x, self.pose.y, self.world):
            status = check_termination(self.pose, self.world, self.goal, self.elapsed, self.robot)
            self.scan = cast_lidar(self.pose, self.world)
        else:
            status = Status.COLLISION

        reward = compute_reward(
            heading_error(self.pose, self.goal),
            action_index,
            goal_distance(self.pose, self.goal),
            self.goal.initial_distance,
            status,
            self.reward_config,
            d_previous=d_previous,
            step_length=self.robot.linear_velocity * self.robot.control_dt,
        )

        self.status = status
        if status == Status.GOAL_REACHED:
            self.goals_reached += 1
            if self.first_goal_time is None:
                self.first_goal_time = self.elapsed
            if self.respawn:
                self.goal = spawn_goal(self.rng, self.world, self.pose)
                out_of_time = self.elapsed >= self.world.episode_time_s - 1e-9
                self.status = Status.TIMEOUT if out_of_time else Status.RUNNING
                logger.debug(f"Goal {self.goals_reached} reached at {self.elapsed:.1f}s, respawned at {self.goal.position}")

        return StepOutcome(reward=float(reward), status=status, observation=self.observe())


def env_step(env: NavigationEnv, action_index: int) -> StepOutcome:
    return env.step(action_index)
