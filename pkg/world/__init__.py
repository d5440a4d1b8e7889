"""
Simulated differential-drive robot in a walled arena with a 24-beam LiDAR
"""

from .environment import NavigationEnv, build_observation, env_step
from .geometry import step_kinematics, wrap_to_pi
from .lidar import cast_lidar
from .rules import check_termination, compute_reward, heading_error, spawn_goal
from .types import GoalState, Pose2D, RewardConfig, RobotParams, Status, StepOutcome, WorldConfig

__all__ = [
    'NavigationEnv', 'build_observation', 'env_step',
    'step_kinematics', 'wrap_to_pi', 'cast_lidar',
    'check_termination', 'compute_reward', 'heading_error', 'spawn_goal',
    'GoalState', 'Pose2D', 'RewardConfig', 'RobotParams', 'Status', 'StepOutcome', 'WorldConfig',
]
