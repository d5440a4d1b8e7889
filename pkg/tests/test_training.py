import os
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
import pytest

import agent.training as training
from agent.chain_mdp import ChainEnv, optimal_actions, value_iteration
from agent.config import AgentConfig, AgentVariant
from agent.training import Agent, run_episode, train
from core.errors import TrainingDivergenceError
from core.records import OUTCOMES
from neural.checkpoint import load_checkpoint
from neural.network import FEEDFORWARD, NetworkConfig, QNetwork
from world.environment import NavigationEnv


@dataclass
class ChainExperiment:
    agent: AgentConfig
    network: NetworkConfig
    variant: AgentVariant = AgentVariant.DQN_ALONE
    seed: int = 0
    milestones: Tuple[int, ...] = ()
    output_dir: str = ""
    log_every: int = 0

    def make_env(self):
        return ChainEnv()


class TestValueIteration:
    def test_chain_values(self):
        q = value_iteration(ChainEnv(), 0.9)
        assert q[3, 3] == pytest.approx(1.0)
        assert q[2, 4] == pytest.approx(1.0)
        assert q[2, 3] == pytest.approx(0.9)
        assert q[0, 4] == pytest.approx(0.9)
        assert q[0, 0] == pytest.approx(0.9 ** 2)
        assert not q[4].any()
        assert optimal_actions(q, 3) == {3, 4}
        assert optimal_actions(q, 0) == {4}


class TestRunEpisode:
    def test_record_invariants(self, small_experiment):
        env = small_experiment.make_env()
        agent = Agent(QNetwork(small_experiment.network), small_experiment.agent, learn=False)
        record = run_episode(env, agent, np.random.default_rng(0), epsilon=0.3, episode=7)
        assert record.episode == 7
        assert 1 <= record.steps <= small_experiment.agent.max_steps_per_episode
        assert record.outcome in OUTCOMES
        assert record.sim_time_s == pytest.approx(record.steps * 0.2)
        assert record.epsilon == 0.3
        assert np.isfinite(record.mean_max_q)

    def test_skip_invariant(self):
        """Greedy actions change only on steps with t mod K == 0 (first step exempt)"""
        config = AgentConfig(action_skip=10, max_steps_per_episode=250)
        network = QNetwork(NetworkConfig(tdl_units=8, gru_units=8, fc1_units=8, init_seed=2))
        agent = Agent(network, config, learn=False)
        env = NavigationEnv()
        violations = 0
        for episode in range(100):
            actions = []
            run_episode(env, agent, np.random.default_rng(episode), epsilon=0.0,
                        step_callback=lambda t, a, outcome: actions.append((t, a)))
            for (_, prev), (t, a) in zip(actions, actions[1:]):
                if a != prev and t % 10 != 0:
                    violations += 1
        assert violations == 0

    def test_same_seed_same_record(self, small_experiment):
        def once():
            env = small_experiment.make_env()
            agent = Agent(QNetwork(small_experiment.network), small_experiment.agent,
                          replay_rng=np.random.default_rng(1))
            return run_episode(env, agent, np.random.default_rng(2), epsilon=0.5)

        assert once() == once()

    def test_learning_agent_stores_every_step(self, small_experiment):
        env = small_experiment.make_env()
        agent = Agent(QNetwork(small_experiment.network), small_experiment.agent, replay_rng=np.random.default_rng(0))
        record = run_episode(env, agent, np.random.default_rng(3), epsilon=1.0)
        assert len(agent.buffer) == record.steps == agent.total_steps
        stored = agent.buffer.transitions()
        for before, after in zip(stored, stored[1:]):
            np.testing.assert_array_equal(before.next_window, after.window)
        assert stored[-1].terminal == (record.outcome == "collision")


class TestAgentSchedule:
    def test_target_syncs_on_schedule(self, small_experiment):
        """Target network moves only on steps that are multiples of target_update_interval"""
        interval = small_experiment.agent.target_update_interval
        env = small_experiment.make_env()
        agent = Agent(QNetwork(small_experiment.network), small_experiment.agent, replay_rng=np.random.default_rng(0))
        policy_rng = np.random.default_rng(4)

        def snapshot(net):
            return b"".join(net.params[name].tobytes() for name in sorted(net.params))

        def after_step(t, action, outcome):
            history.append((agent.total_steps, agent.target.version, snapshot(agent.target), snapshot(agent.online)))

        history = [(0, agent.target.version, snapshot(agent.target), snapshot(agent.online))]
        while agent.total_steps < 120:
            run_episode(env, agent, policy_rng, epsilon=1.0, step_callback=after_step)

        for (_, version_before, before, _), (total, version, after, online) in zip(history, history[1:]):
            if total % interval == 0:
                assert version == version_before + 1
                assert after != before
                assert after == online
            else:
                assert version == version_before
                assert after == before
        assert agent.syncs == agent.total_steps // interval
        assert agent.updates == agent.total_steps - (small_experiment.agent.learning_start - 1)
        assert agent.last_loss is not None and np.isfinite(agent.last_loss)


class TestTrain:
    def test_single_episode(self, small_experiment):
        experiment = replace(small_experiment, agent=replace(small_experiment.agent, max_episodes=1), milestones=())
        result = train(experiment)
        assert len(result.records) == 1
        assert result.checkpoint.metadata["episode"] == 1

    def test_deterministic_with_milestones(self, small_experiment, tmp_path):
        first = train(replace(small_experiment, output_dir=str(tmp_path / "a")))
        second = train(replace(small_experiment, output_dir=str(tmp_path / "b")))
        assert first.records == second.records
        assert [os.path.basename(p) for p in first.milestone_paths] == ["checkpoint_ep2.json"]
        with open(first.milestone_paths[0], "rb") as f1, open(second.milestone_paths[0], "rb") as f2:
            assert f1.read() == f2.read()

    def test_checkpoint_metadata(self, small_experiment):
        result = train(replace(small_experiment, output_dir=""))
        meta = result.checkpoint.metadata
        assert meta["variant"] == "dqn-gru-skip"
        assert meta["action_skip"] == 10
        assert meta["episode"] == 3
        assert meta["total_steps"] == sum(r.steps for r in result.records)
        assert set(result.checkpoint.rng_state) == {"policy", "replay"}
        assert meta["environment"]["lidar"]["beams"] == 24
        assert set(meta["environment"]) == {"arena", "robot", "lidar", "reward", "goal"}

    def test_skip_variant_with_k1_matches_gru(self, small_experiment):
        base = replace(small_experiment, output_dir="", milestones=())
        gru = train(replace(base, variant=AgentVariant.DQN_GRU, agent=replace(base.agent, action_skip=1)))
        skip = train(replace(base, variant=AgentVariant.DQN_GRU_SKIP, agent=replace(base.agent, action_skip=1)))
        assert skip.records == gru.records
        params = gru.checkpoint.network.params
        assert list(skip.checkpoint.network.params) == list(params)
        for name, value in skip.checkpoint.network.params.items():
            assert value.tobytes() == params[name].tobytes()

    def test_divergence_writes_diagnostic_checkpoint(self, small_experiment, tmp_path, monkeypatch):
        def explode(*args, **kwargs):
            raise TrainingDivergenceError("non-finite loss nan")

        monkeypatch.setattr(training, "train_step", explode)
        seen = []
        with pytest.raises(TrainingDivergenceError):
            train(replace(small_experiment, output_dir=str(tmp_path)), on_milestone=lambda ep, recs: seen.append(ep))
        path = tmp_path / "diverged_episode_1.json"
        assert path.exists()
        assert load_checkpoint(str(path)).metadata["episode"] == 1
        assert seen == [1]

    def test_step_budget(self, small_experiment):
        experiment = replace(small_experiment, agent=replace(small_experiment.agent, max_episodes=50, max_total_steps=60))
        result = train(replace(experiment, output_dir="", milestones=()))
        assert sum(r.steps for r in result.records) >= 60
        assert sum(r.steps for r in result.records[:-1]) < 60


def test_chain_mdp_learns_optimal_policy():
    """Replay, targets and Adam updates recover Q* of the chain within 20k steps"""
    env = ChainEnv()
    gamma = 0.9
    experiment = ChainExperiment(
        agent=AgentConfig(
            gamma=gamma, batch_size=32, target_update_interval=500, epsilon_start=1.0, epsilon_decay=1.0,
            epsilon_min=1.0, action_skip=1, replay_capacity=10_000, learning_start=32, max_episodes=100_000,
            max_steps_per_episode=20, max_total_steps=20_000, learning_rate=2e-3,
        ),
        network=NetworkConfig(obs_dim=5, seq_len=1, n_actions=5, family=FEEDFORWARD, ff_units=32, init_seed=0),
        seed=3,
    )
    result = train(experiment, env=env)
    assert sum(r.steps for r in result.records) <= 20_000 + 20

    net = result.checkpoint.network
    q_star = value_iteration(env, gamma)
    for s in range(env.n_states - 1):
        q = net.q_values(env.one_hot(s)[None])
        assert np.max(np.abs(q - q_star[s])) < 0.05
        assert int(np.argmax(q)) in optimal_actions(q_star, s)
