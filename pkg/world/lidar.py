"""
Simulated 360 degree LiDAR
"""

import math

import numpy as np

from core.errors import InvalidStateError
from world.geometry import TWO_PI, inside_arena, ray_distances
from world.types import LidarScan, Pose2D, WorldConfig


def beam_angles(pose: Pose2D, beams: int) -> np.ndarray:
    """Beam k points at yaw + k * 2pi / beams"""
    return pose.yaw + np.arange(beams, dtype=np.float64) * (TWO_PI / beams)


def cast_lidar(pose: Pose2D, world: WorldConfig) -> LidarScan:
    if not (math.isfinite(pose.x) and math.isfinite(pose.y) and math.isfinite(pose.yaw)):
        raise InvalidStateError(f"non-finite pose {pose}")
    if not inside_arena(pose.x, pose.y, world):
        raise InvalidStateError(f"pose ({pose.x:.3f}, {pose.y:.3f}) is outside the arena {world.arena_bounds}")

    hits = ray_distances(pose.x, pose.y, beam_angles(pose, world.lidar_beams), world)
    ranges = np.where(hits < world.lidar_max_range, hits, world.lidar_max_range)
    return LidarScan(ranges=ranges)
