import os

import pytest

from agent.config import AgentVariant
from core.config_manager import AUTO, ConfigManager
from core.errors import ConfigurationError
from neural.network import FEEDFORWARD

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SHIPPED_CONFIG = os.path.join(PROJECT_ROOT, "config", "navigation.conf")


def write_conf(tmp_path, text, name="exp.conf"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestParsing:
    def test_shipped_file_matches_defaults(self):
        shipped = ConfigManager(SHIPPED_CONFIG)
        assert shipped.config == ConfigManager().config

    def test_values_and_comments(self, tmp_path):
        path = write_conf(tmp_path, """
# header comment
[arena]
obstacles = 1.0, 1.0, 0.25; -1.0, 0.5, 0.3   # two pillars
[robot]
angular_velocities = -1.0, -0.5, 0.0, 0.5, 1.0
[goal]
respawn = no
[experiment]
milestones = 10, 20
variant = DQN
""")
        cm = ConfigManager(path)
        assert cm.get("arena.obstacles") == ((1.0, 1.0, 0.25), (-1.0, 0.5, 0.3))
        assert cm.get("robot.angular_velocities") == (-1.0, -0.5, 0.0, 0.5, 1.0)
        assert cm.get("goal.respawn") is False
        assert cm.get("experiment.milestones") == (10, 20)

        exp = cm.experiment_config()
        assert exp.variant is AgentVariant.DQN_ALONE
        assert exp.robot.angular_velocities[0] == -1.0
        assert exp.network.family == FEEDFORWARD
        assert exp.respawn is False
        assert len(exp.world.circular_obstacles) == 2

    def test_unknown_key_reports_line(self, tmp_path):
        path = write_conf(tmp_path, "[agent]\ngamma = 0.9\nlearning_rat = 0.1\n")
        with pytest.raises(ConfigurationError) as info:
            ConfigManager(path)
        assert info.value.line == 3
        assert str(info.value).startswith(f"{path}:3: ")
        assert "learning_rat" in str(info.value)

    @pytest.mark.parametrize("text, line", [
        ("[agent\ngamma = 0.9\n", 1),
        ("[optimiser]\n", 1),
        ("gamma = 0.9\n", 1),
        ("[agent]\n\ngamma\n", 3),
        ("[agent]\nbatch_size = sixty\n", 2),
        ("[arena]\nobstacles = 1.0, 2.0\n", 2),
        ("[goal]\nrespawn = maybe\n", 2),
    ])
    def test_malformed_lines(self, tmp_path, text, line):
        with pytest.raises(ConfigurationError) as info:
            ConfigManager(write_conf(tmp_path, text))
        assert info.value.line == line

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ConfigManager(str(tmp_path / "nope.conf"))


class TestOverrides:
    def test_override_wins_over_file(self, tmp_path):
        path = write_conf(tmp_path, "[agent]\ngamma = 0.9\n")
        cm = ConfigManager(path, overrides={"agent.gamma": "0.95", "experiment.seed": "7"})
        assert cm.get("agent.gamma") == 0.95
        assert cm.get("experiment.seed") == 7

    @pytest.mark.parametrize("dotted", ["gamma", "optimiser.lr", "agent.gama"])
    def test_bad_override(self, dotted):
        with pytest.raises(ConfigurationError):
            ConfigManager(overrides={dotted: "1"})


class TestAutoValues:
    def test_action_skip_follows_variant(self):
        for variant, expected in (("dqn-gru-skip", 10), ("dqn-gru", 1), ("dqn", 1)):
            exp = ConfigManager(overrides={"experiment.variant": variant}).experiment_config()
            assert exp.agent.action_skip == expected

    def test_explicit_action_skip(self):
        exp = ConfigManager(overrides={"experiment.variant": "dqn-gru", "agent.action_skip": "4"}).experiment_config()
        assert exp.agent.action_skip == 4

    def test_init_seed_defaults_to_experiment_seed(self):
        cm = ConfigManager(overrides={"experiment.seed": "11"})
        assert cm.get("network.init_seed") == AUTO
        assert cm.network_config().init_seed == 11
        cm.apply_overrides({"network.init_seed": "3"})
        assert cm.network_config().init_seed == 3

    def test_optimizer_comes_from_network_section(self):
        agent = ConfigManager(overrides={"network.optimizer": "sgd", "network.learning_rate": "0.01"}).agent_config()
        assert agent.optimizer == "sgd"
        assert agent.learning_rate == 0.01

    def test_observation_size_follows_lidar(self):
        net = ConfigManager(overrides={"lidar.beams": "12"}).network_config()
        assert net.obs_dim == 14


class TestValidation:
    def test_defaults_are_clean(self):
        assert ConfigManager().validate_configuration()["errors"] == []

    def test_collects_every_error(self):
        cm = ConfigManager(overrides={
            "agent.gamma": "1.5",
            "reward.mode": "shaped",
            "experiment.milestones": "0, 10",
        })
        errors = cm.validate_configuration()["errors"]
        assert any(e.startswith("[agent]") for e in errors)
        assert any(e.startswith("[reward]") for e in errors)
        assert any(e.startswith("[experiment]") for e in errors)
        with pytest.raises(ConfigurationError):
            cm.experiment_config()

    def test_short_episode_warning(self):
        issues = ConfigManager(overrides={"agent.max_steps_per_episode": "100"}).validate_configuration()
        assert issues["errors"] == []
        assert any("max_steps_per_episode" in w for w in issues["warnings"])

    def test_unreachable_milestone_suggestion(self):
        issues = ConfigManager(overrides={"agent.max_episodes": "100"}).validate_configuration()
        assert issues["suggestions"]


class TestSaving:
    def test_save_and_reload(self, tmp_path):
        cm = ConfigManager(overrides={
            "arena.obstacles": "0.8, 0.8, 0.3",
            "arena.walls": "0.0, 1.0, 1.0, 1.0",
            "agent.epsilon_decay": "0.995",
            "experiment.output_dir": "runs/x",
        })
        path = cm.save_config(str(tmp_path / "out" / "resolved.conf"))
        reloaded = ConfigManager(path)
        assert reloaded.config == cm.config
        assert reloaded.to_text() == cm.to_text()

    def test_summary(self):
        summary = ConfigManager().get_config_summary()
        assert summary["config_source"] == "defaults"
        assert summary["variant"] == "dqn-gru-skip"
