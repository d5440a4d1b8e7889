"""
Value types of the navigation world
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from core.errors import ConfigurationError

Segment = Tuple[float, float, float, float]
Circle = Tuple[float, float, float]

DEFAULT_ANGULAR_VELOCITIES = (-1.5, -0.75, 0.0, 0.75, 1.5)


class Status(str, Enum):
    RUNNING = "running"
    GOAL_REACHED = "goal"
    COLLISION = "collision"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    yaw: float


@dataclass(frozen=True)
class RobotParams:
    linear_velocity: float = 0.15
    control_dt: float = 0.2
    body_radius: float = 0.15
    angular_velocities: Tuple[float, ...] = DEFAULT_ANGULAR_VELOCITIES

    def __post_init__(self):
        object.__setattr__(self, "angular_velocities", tuple(float(w) for w in self.angular_velocities))
        issues = self.problems()
        if issues:
            raise ConfigurationError("; ".join(issues))

    def problems(self) -> List[str]:
        issues = []
        w = self.angular_velocities
        if len(w) != 5:
            issues.append(f"angular_velocities needs exactly 5 entries, got {len(w)}")
        elif any(b <= a for a, b in zip(w, w[1:])):
            issues.append("angular_velocities must be strictly increasing")
        elif any(not math.isclose(w[i], -w[-1 - i], abs_tol=1e-12) for i in range(len(w))):
            issues.append("angular_velocities must be symmetric about 0")
        if not self.linear_velocity > 0:
            issues.append("linear_velocity must be > 0")
        if not self.control_dt > 0:
            issues.append("control_dt must be > 0")
        if not self.body_radius > 0:
            issues.append("body_radius must be > 0")
        return issues


def square_walls(half_width: float, half_height: float) -> Tuple[Segment, ...]:
    """Boundary walls of an origin-centred rectangle"""
    w, h = half_width, half_height
    return (
        (-w, -h, w, -h),
        (w, -h, w, h),
        (w, h, -w, h),
        (-w, h, -w, -h),
    )


@dataclass(frozen=True)
class WorldConfig:
    """Arena geometry plus the sensing and goal constants tied to it"""

    arena_bounds: Tuple[float, float, float, float] = (-2.0, -2.0, 2.0, 2.0)
    wall_segments: Tuple[Segment, ...] = field(default_factory=lambda: square_walls(2.0, 2.0))
    circular_obstacles: Tuple[Circle, ...] = ()
    lidar_beams: int = 24
    lidar_max_range: float = 3.5
    goal_radius: float = 0.2
    goal_clearance: float = 0.3
    goal_min_robot_distance: float = 0.5
    episode_time_s: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "arena_bounds", tuple(float(v) for v in self.arena_bounds))
        object.__setattr__(self, "wall_segments", tuple(tuple(float(v) for v in s) for s in self.wall_segments))
        object.__setattr__(self, "circular_obstacles", tuple(tuple(float(v) for v in c) for c in self.circular_obstacles))

    @classmethod
    def walled_rectangle(cls, width: float = 4.0, height: float = 4.0, obstacles=(), extra_walls=(), **kwargs) -> "WorldConfig":
        hw, hh = width / 2.0, height / 2.0
        return cls(
            arena_bounds=(-hw, -hh, hw, hh),
            wall_segments=square_walls(hw, hh) + tuple(extra_walls),
            circular_obstacles=tuple(obstacles),
            **kwargs,
        )

    @property
    def diagonal(self) -> float:
        xmin, ymin, xmax, ymax = self.arena_bounds
        return math.hypot(xmax - xmin, ymax - ymin)

    @property
    def observation_size(self) -> int:
        return self.lidar_beams + 2

    def problems(self, body_radius: Optional[float] = None) -> List[str]:
        issues = []
        xmin, ymin, xmax, ymax = self.arena_bounds
        if not (xmax > xmin and ymax > ymin):
            issues.append("arena bounds are empty")
        if self.lidar_beams < 3:
            issues.append("lidar_beams must be >= 3")
        if body_radius is not None and not self.lidar_max_range > body_radius:
            issues.append("lidar_max_range must exceed body_radius")
        if not self.goal_radius > 0:
            issues.append("goal_radius must be > 0")
        if self.goal_clearance < 0:
            issues.append("goal_clearance must be >= 0")
        if not self.episode_time_s > 0:
            issues.append("episode_time_s must be > 0")
        eps = 1e-9
        for seg in self.wall_segments:
            if not all(xmin - eps <= seg[i] <= xmax + eps and ymin - eps <= seg[i + 1] <= ymax + eps for i in (0, 2)):
                issues.append(f"wall segment {seg} leaves the arena")
        for cx, cy, r in self.circular_obstacles:
            if r <= 0:
                issues.append(f"obstacle at ({cx}, {cy}) has non-positive radius")
            elif cx - r < xmin - eps or cx + r > xmax + eps or cy - r < ymin - eps or cy + r > ymax + eps:
                issues.append(f"obstacle at ({cx}, {cy}) r={r} leaves the arena")
        return issues


@dataclass(frozen=True)
class LidarScan:
    ranges: np.ndarray


@dataclass(frozen=True)
class GoalState:
    position: Tuple[float, float]
    initial_distance: float


@dataclass(frozen=True)
class Observation:
    values: np.ndarray


@dataclass(frozen=True)
class StepOutcome:
    reward: float
    status: Status
    observation: Observation


@dataclass(frozen=True)
class RewardConfig:
    """literal: 2*(D_c/D_g) distance factor; progress: gain * (D_prev - D_c) / (v * dt)"""

    mode: str = "literal"
    collision_penalty: float = -100.0
    goal_reward: float = 200.0
    progress_gain: float = 10.0

    def __post_init__(self):
        issues = self.problems()
        if issues:
            raise ConfigurationError("; ".join(issues))

    def problems(self) -> List[str]:
        issues = []
        if self.mode not in ("literal", "progress"):
            issues.append(f"reward mode must be 'literal' or 'progress', got '{self.mode}'")
        return issues
