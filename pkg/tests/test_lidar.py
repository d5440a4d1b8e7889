import math

import numpy as np
import pytest

from core.errors import InvalidStateError
from world.geometry import surface_distance
from world.lidar import beam_angles, cast_lidar
from world.types import Pose2D, WorldConfig

MARCH_STEP = 1e-4


def march_ranges(pose: Pose2D, world: WorldConfig) -> np.ndarray:
    """Brute-force oracle: walk every beam outward in MARCH_STEP increments until it leaves free space"""
    xmin, ymin, xmax, ymax = world.arena_bounds
    t = np.arange(1, int(world.lidar_max_range / MARCH_STEP) + 1) * MARCH_STEP
    angles = beam_angles(pose, world.lidar_beams)
    px = pose.x + np.cos(angles)[:, None] * t
    py = pose.y + np.sin(angles)[:, None] * t
    blocked = (px <= xmin) | (px >= xmax) | (py <= ymin) | (py >= ymax)
    for cx, cy, r in world.circular_obstacles:
        blocked |= (px - cx) ** 2 + (py - cy) ** 2 <= r * r
    first = np.argmax(blocked, axis=1)
    hit = blocked[np.arange(len(angles)), first]
    return np.where(hit, t[first], world.lidar_max_range)


def random_world(rng: np.random.Generator) -> WorldConfig:
    circles = []
    for _ in range(int(rng.integers(0, 4))):
        r = float(rng.uniform(0.1, 0.4))
        circles.append((float(rng.uniform(-1.5, 1.5)), float(rng.uniform(-1.5, 1.5)), r))
    return WorldConfig(circular_obstacles=tuple(circles))


def random_free_pose(rng: np.random.Generator, world: WorldConfig) -> Pose2D:
    while True:
        x, y = rng.uniform(-1.9, 1.9, size=2)
        if surface_distance(float(x), float(y), world) > 0.05:
            return Pose2D(float(x), float(y), float(rng.uniform(-math.pi, math.pi)))


def check_against_oracle(n_poses: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    for _ in range(n_poses):
        world = random_world(rng)
        pose = random_free_pose(rng, world)
        np.testing.assert_allclose(cast_lidar(pose, world).ranges, march_ranges(pose, world), atol=5e-4)


class TestCastLidar:
    def test_perpendicular_wall(self, world, origin):
        assert cast_lidar(origin, world).ranges[0] == pytest.approx(2.0)

    def test_corner_beam(self, world, origin):
        assert cast_lidar(origin, world).ranges[3] == pytest.approx(2.8284271, abs=1e-7)

    def test_shape_and_clamp(self, origin):
        world = WorldConfig.walled_rectangle(10.0, 10.0)
        ranges = cast_lidar(origin, world).ranges
        assert ranges.shape == (24,)
        assert np.all(ranges == world.lidar_max_range)

    def test_beams_follow_heading(self, world):
        # facing +y, beam 0 sees the top wall and beam 6 the left wall
        ranges = cast_lidar(Pose2D(0.5, 1.0, math.pi / 2), world).ranges
        assert ranges[0] == pytest.approx(1.0)
        assert ranges[6] == pytest.approx(2.5)

    def test_mirror_symmetry(self):
        world = WorldConfig(circular_obstacles=((1.0, 0.6, 0.3), (1.0, -0.6, 0.3)))
        ranges = cast_lidar(Pose2D(0.0, 0.0, 0.0), world).ranges
        for k in range(1, 24):
            assert ranges[k] == pytest.approx(ranges[24 - k], abs=1e-12)

    def test_obstacle_in_front(self, origin):
        world = WorldConfig(circular_obstacles=((1.0, 0.0, 0.25),))
        assert cast_lidar(origin, world).ranges[0] == pytest.approx(0.75)

    def test_outside_arena_is_rejected(self, world):
        with pytest.raises(InvalidStateError):
            cast_lidar(Pose2D(2.5, 0.0, 0.0), world)
        with pytest.raises(InvalidStateError):
            cast_lidar(Pose2D(math.nan, 0.0, 0.0), world)

    def test_matches_ray_marching(self):
        check_against_oracle(n_poses=100, seed=3)

    @pytest.mark.slow
    def test_matches_ray_marching_full(self):
        check_against_oracle(n_poses=1000, seed=11)
