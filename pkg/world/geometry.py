"""
Planar geometry: angle wrapping, unicycle integration, ray and distance queries
"""

import math

import numpy as np

from core.errors import InvalidStateError
from world.types import Pose2D, WorldConfig

TWO_PI = 2.0 * math.pi
STRAIGHT_LINE_OMEGA = 1e-9
_HIT_EPS = 1e-12


def wrap_to_pi(angle: float) -> float:
    """Wrap an angle into (-pi, pi]"""
    if -math.pi < angle <= math.pi:
        return angle
    wrapped = math.pi - ((math.pi - angle) % TWO_PI)
    # the modulo can round up to TWO_PI for angles just above pi
    return wrapped if wrapped > -math.pi else wrapped + TWO_PI


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorised wrap_to_pi"""
    angles = np.asarray(angles, dtype=np.float64)
    wrapped = np.pi - np.mod(np.pi - angles, TWO_PI)
    wrapped = np.where(wrapped > -np.pi, wrapped, wrapped + TWO_PI)
    return np.where((angles > -np.pi) & (angles <= np.pi), angles, wrapped)


def step_kinematics(pose: Pose2D, v: float, omega: float, dt: float) -> Pose2D:
    """Closed-form unicycle step over dt with constant (v, omega)"""
    values = (pose.x, pose.y, pose.yaw, v, omega, dt)
    if not all(math.isfinite(value) for value in values):
        raise InvalidStateError(f"non-finite kinematic input: pose={pose}, v={v}, omega={omega}, dt={dt}")
    if dt <= 0:
        raise InvalidStateError(f"dt must be positive, got {dt}")

    yaw_next = wrap_to_pi(pose.yaw + omega * dt)
    if abs(omega) < STRAIGHT_LINE_OMEGA:
        return Pose2D(
            x=pose.x + v * dt * math.cos(pose.yaw),
            y=pose.y + v * dt * math.sin(pose.yaw),
            yaw=yaw_next,
        )
    radius = v / omega
    return Pose2D(
        x=pose.x + radius * (math.sin(yaw_next) - math.sin(pose.yaw)),
        y=pose.y - radius * (math.cos(yaw_next) - math.cos(pose.yaw)),
        yaw=yaw_next,
    )


def inside_arena(x: float, y: float, world: WorldConfig) -> bool:
    xmin, ymin, xmax, ymax = world.arena_bounds
    return xmin <= x <= xmax and ymin <= y <= ymax


def _segments(world: WorldConfig) -> np.ndarray:
    if not world.wall_segments:
        return np.zeros((0, 4))
    return np.asarray(world.wall_segments, dtype=np.float64)


def _circles(world: WorldConfig) -> np.ndarray:
    if not world.circular_obstacles:
        return np.zeros((0, 3))
    return np.asarray(world.circular_obstacles, dtype=np.float64)


def ray_distances(x: float, y: float, angles: np.ndarray, world: WorldConfig) -> np.ndarray:
    """Distance along each ray to the nearest wall or obstacle, inf where nothing is hit"""
    angles = np.asarray(angles, dtype=np.float64)
    dx, dy = np.cos(angles)[:, None], np.sin(angles)[:, None]
    best = np.full(angles.shape[0], np.inf)

    segs = _segments(world)
    if len(segs):
        ax, ay = segs[:, 0] - x, segs[:, 1] - y
        ex, ey = segs[:, 2] - segs[:, 0], segs[:, 3] - segs[:, 1]
        denom = dx * ey - dy * ex
        parallel = np.abs(denom) < _HIT_EPS
        safe = np.where(parallel, 1.0, denom)
        t = (ax * ey - ay * ex) / safe
        u = (ax * dy - ay * dx) / safe
        hit = ~parallel & (t > _HIT_EPS) & (u >= 0.0) & (u <= 1.0)
        best = np.minimum(best, np.where(hit, t, np.inf).min(axis=1))

    circles = _circles(world)
    if len(circles):
        fx, fy = x - circles[:, 0], y - circles[:, 1]
        b = dx * fx + dy * fy
        c = fx * fx + fy * fy - circles[:, 2] ** 2
        disc = b * b - c
        root = np.sqrt(np.where(disc >= 0.0, disc, 0.0))
        near, far = -b - root, -b + root
        t = np.where(near > _HIT_EPS, near, np.where(far > _HIT_EPS, far, np.inf))
        t = np.where(disc >= 0.0, t, np.inf)
        best = np.minimum(best, t.min(axis=1))

    return best


def surface_distance(x: float, y: float, world: WorldConfig) -> float:
    """Distance from a point to the closest wall or obstacle surface (negative inside an obstacle)"""
    best = math.inf
    segs = _segments(world)
    if len(segs):
        ax, ay = segs[:, 0], segs[:, 1]
        ex, ey = segs[:, 2] - ax, segs[:, 3] - ay
        length_sq = ex * ex + ey * ey
        s = np.where(length_sq > 0, ((x - ax) * ex + (y - ay) * ey) / np.where(length_sq > 0, length_sq, 1.0), 0.0)
        s = np.clip(s, 0.0, 1.0)
        best = min(best, float(np.hypot(ax + s * ex - x, ay + s * ey - y).min()))
    circles = _circles(world)
    if len(circles):
        best = min(best, float((np.hypot(circles[:, 0] - x, circles[:, 1] - y) - circles[:, 2]).min()))
    return best
