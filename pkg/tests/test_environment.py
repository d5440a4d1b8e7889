import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import ConfigurationError, ContractViolationError
from world.environment import NavigationEnv, env_step
from world.geometry import surface_distance
from world.types import GoalState, Pose2D, Status, WorldConfig

FORWARD = 2


def make_env(**kwargs):
    return NavigationEnv(**kwargs)


class TestReset:
    def test_observation_layout(self, rng):
        env = make_env()
        obs = env.reset(rng)
        assert obs.shape == (26,)
        np.testing.assert_allclose(obs[:24] * env.world.lidar_max_range, env.scan.ranges)
        assert obs[24] == pytest.approx(math.atan2(env.goal.position[1], env.goal.position[0]) / math.pi)
        assert obs[25] == pytest.approx(env.goal.initial_distance / env.world.diagonal)

    def test_fixed_spawn(self, rng):
        env = make_env()
        env.reset(rng)
        assert env.pose == Pose2D(0.0, 0.0, 0.0)
        assert env.status == Status.RUNNING
        assert env.steps == 0

    def test_random_spawn_is_free(self):
        env = make_env(world=WorldConfig(circular_obstacles=((0.8, 0.8, 0.3),)), random_spawn=True)
        poses = set()
        for seed in range(50):
            env.reset(np.random.default_rng(seed))
            assert surface_distance(env.pose.x, env.pose.y, env.world) >= env.robot.body_radius
            poses.add((env.pose.x, env.pose.y))
        assert len(poses) == 50

    def test_blocked_centre(self, rng):
        env = make_env(world=WorldConfig(circular_obstacles=((0.0, 0.0, 0.3),)))
        with pytest.raises(ConfigurationError):
            env.reset(rng)


class TestStep:
    def test_wall_collision(self, rng):
        env = make_env()
        env.reset(rng)
        env.pose = Pose2D(1.84, 0.0, 0.0)
        outcome = env_step(env, FORWARD)
        assert outcome.status == Status.COLLISION
        assert outcome.reward == -100.0
        assert env.done and env.terminal

    def test_step_after_end_is_rejected(self, rng):
        env = make_env()
        env.reset(rng)
        env.pose = Pose2D(1.84, 0.0, 0.0)
        env.step(FORWARD)
        with pytest.raises(ContractViolationError):
            env.step(FORWARD)

    def test_bad_action(self, rng):
        env = make_env()
        env.reset(rng)
        with pytest.raises(ContractViolationError):
            env.step(7)

    def test_goal_respawns(self, rng):
        env = make_env(respawn=True)
        env.reset(rng)
        env.goal = GoalState(position=(0.1, 0.0), initial_distance=0.1)
        outcome = env.step(FORWARD)
        assert outcome.status == Status.GOAL_REACHED
        assert outcome.reward == 200.0
        assert env.status == Status.RUNNING
        assert not env.terminal
        assert env.goals_reached == 1
        assert env.first_goal_time == pytest.approx(0.2)
        assert env.goal.position != (0.1, 0.0)

    def test_goal_ends_episode_without_respawn(self, rng):
        env = make_env(respawn=False)
        env.reset(rng)
        env.goal = GoalState(position=(0.1, 0.0), initial_distance=0.1)
        env.step(FORWARD)
        assert env.status == Status.GOAL_REACHED
        assert env.done and env.terminal

    def test_timeout_is_truncation(self, rng):
        env = make_env(world=WorldConfig(episode_time_s=1.0))
        env.reset(rng)
        statuses = [env.step(FORWARD).status for _ in range(5)]
        assert statuses == [Status.RUNNING] * 4 + [Status.TIMEOUT]
        assert env.done and not env.terminal
        assert env.elapsed == pytest.approx(1.0)

    def test_running_reward_matches_shaping(self, rng):
        env = make_env()
        env.reset(rng)
        outcome = env.step(FORWARD)
        assert outcome.status == Status.RUNNING
        assert abs(outcome.reward) <= 10.0 * 2.0

    def test_replay_is_bit_identical(self):
        script = [FORWARD, 3, 3, FORWARD, 1, 0, FORWARD, 4, FORWARD, FORWARD]

        def trace(seed):
            env = make_env()
            env.reset(np.random.default_rng(seed))
            out = []
            for t in range(250):
                o = env.step(script[t % len(script)])
                out.append((o.reward, o.status, o.observation.values.tobytes(), env.pose))
                if env.done:
                    break
            return out

        assert trace(21) == trace(21)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=60))
def test_observation_bounds(seed, actions):
    env = NavigationEnv()
    obs = env.reset(np.random.default_rng(seed))
    observations = [obs]
    for a in actions:
        observations.append(env.step(a).observation.values)
        if env.done:
            break
    for o in observations:
        assert np.all((o[:24] >= 0.0) & (o[:24] <= 1.0))
        assert -1.0 < o[24] <= 1.0
        assert 0.0 <= o[25] <= 1.0
