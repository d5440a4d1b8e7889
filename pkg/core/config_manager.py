#!/usr/bin/env python3
"""
Unified Configuration Manager
Single interface to every setting of an experiment: arena, robot, sensor,
reward, network, agent and run plumbing
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from core.errors import ConfigurationError

logger = logging.getLogger(__name__)

SECTIONS = ("arena", "robot", "lidar", "reward", "goal", "network", "agent", "experiment")
ENVIRONMENT_SECTIONS = ("arena", "robot", "lidar", "reward", "goal")
AUTO = "auto"
AUTO_KEYS = {"network.ff_units", "network.init_seed", "agent.action_skip"}
TUPLE_KEYS = {"arena.obstacles": 3, "arena.walls": 4}
LIST_KEYS = {"robot.angular_velocities": float, "experiment.milestones": int}
TRUE_WORDS = ("true", "yes", "on", "1")
FALSE_WORDS = ("false", "no", "off", "0")


def _as_tuples(value: Any) -> Any:
    """JSON gives lists back where the config holds tuples"""
    if isinstance(value, list):
        return tuple(_as_tuples(v) for v in value)
    return value


@dataclass
class ExperimentConfig:
    """Everything one training or evaluation run needs, fully resolved"""

    world: Any
    robot: Any
    reward: Any
    network: Any
    agent: Any
    variant: Any
    seed: int = 0
    output_dir: str = "runs/default"
    milestones: Tuple[int, ...] = (500, 1000, 3000)
    respawn: bool = True
    random_spawn: bool = False
    eval_episodes: int = 100
    eval_workers: int = 1
    log_every: int = 10
    source: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def make_env(self, respawn: Optional[bool] = None):
        from world.environment import NavigationEnv

        return NavigationEnv(
            self.world,
            self.robot,
            self.reward,
            respawn=self.respawn if respawn is None else respawn,
            random_spawn=self.random_spawn,
        )


class ConfigManager:
    """
    Loads a key=value configuration file with [section] headers on top of
    documented defaults, applies dotted overrides, validates, and builds the
    typed configs used by the world, the network and the agent
    """

    def __init__(self, config_path: Optional[str] = None, overrides: Optional[Dict[str, str]] = None):
        self.config_path = config_path
        self.config = self.load_configuration()
        if overrides:
            self.apply_overrides(overrides)

    def load_configuration(self) -> Dict[str, Dict[str, Any]]:
        """Defaults, then the config file when one is given"""
        config = self._get_defaults()
        if self.config_path is None:
            logger.info("No config file given, using defaults")
            return config
        if not os.path.exists(self.config_path):
            raise ConfigurationError(f"config file not found: {self.config_path}")
        logger.info(f"Loading configuration from {self.config_path}")
        with open(self.config_path, "r", encoding="utf-8") as f:
            self._parse_lines(f.read().splitlines(), config, self.config_path)
        return config

    # ==================== DEFAULTS ====================

    def _get_defaults(self) -> Dict[str, Dict[str, Any]]:
        return {
            "arena": self._get_default_arena(),
            "robot": self._get_default_robot(),
            "lidar": self._get_default_lidar(),
            "reward": self._get_default_reward(),
            "goal": self._get_default_goal(),
            "network": self._get_default_network(),
            "agent": self._get_default_agent(),
            "experiment": self._get_default_experiment(),
        }

    def _get_default_arena(self) -> Dict[str, Any]:
        """Origin-centred walled rectangle, no interior obstacles"""
        return {
            "width": 4.0,
            "height": 4.0,
            "obstacles": (),
            "walls": (),
            "episode_time_s": 50.0,
        }

    def _get_default_robot(self) -> Dict[str, Any]:
        return {
            "linear_velocity": 0.15,
            "control_dt": 0.2,
            "body_radius": 0.15,
            "angular_velocities": (-1.5, -0.75, 0.0, 0.75, 1.5),
        }

    def _get_default_lidar(self) -> Dict[str, Any]:
        return {
            "beams": 24,
            "max_range": 3.5,
        }

    def _get_default_reward(self) -> Dict[str, Any]:
        return {
            "mode": "literal",
            "collision_penalty": -100.0,
            "goal_reward": 200.0,
            "progress_gain": 10.0,
        }

    def _get_default_goal(self) -> Dict[str, Any]:
        return {
            "radius": 0.2,
            "clearance": 0.3,
            "min_robot_distance": 0.5,
            "respawn": True,
        }

    def _get_default_network(self) -> Dict[str, Any]:
        return {
            "seq_len": 4,
            "tdl_units": 64,
            "gru_units": 64,
            "fc1_units": 64,
            "ff_units": AUTO,
            "init_scheme": "glorot_uniform",
            "init_seed": AUTO,
            "optimizer": "adam",
            "learning_rate": 0.001,
        }

    def _get_default_agent(self) -> Dict[str, Any]:
        return {
            "gamma": 0.99,
            "batch_size": 64,
            "target_update_interval": 2000,
            "epsilon_start": 1.0,
            "epsilon_decay": 0.99,
            "epsilon_min": 0.05,
            "action_skip": AUTO,
            "replay_capacity": 100000,
            "learning_start": 64,
            "train_every": 1,
            "max_episodes": 3000,
            "max_steps_per_episode": 250,
            "max_total_steps": 0,
            "skip_gates_exploration": False,
        }

    def _get_default_experiment(self) -> Dict[str, Any]:
        return {
            "variant": "dqn-gru-skip",
            "seed": 0,
            "output_dir": "runs/default",
            "milestones": (500, 1000, 3000),
            "eval_episodes": 100,
            "eval_workers": 1,
            "random_spawn": False,
            "log_every": 10,
        }

    # ==================== PARSING ====================

    def _parse_lines(self, lines: List[str], config: Dict[str, Dict[str, Any]], path: Optional[str] = None) -> None:
        section = None
        for number, raw_line in enumerate(lines, start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise ConfigurationError(f"malformed section header '{line}'", number, path)
                section = line[1:-1].strip()
                if section not in SECTIONS:
                    raise ConfigurationError(f"unknown section [{section}]", number, path)
                continue
            if "=" not in line:
                raise ConfigurationError(f"expected 'key = value', got '{line}'", number, path)
            if section is None:
                raise ConfigurationError("key outside of any [section]", number, path)
            key, value = (part.strip() for part in line.split("=", 1))
            config[section][key] = self._parse_value(section, key, value, number, path)

    def _parse_value(self, section: str, key: str, raw: str, line: Optional[int] = None, path: Optional[str] = None) -> Any:
        defaults = self._get_defaults()[section]
        if key not in defaults:
            raise ConfigurationError(f"unknown key '{key}' in [{section}]", line, path)
        dotted = f"{section}.{key}"
        default = defaults[key]
        try:
            if dotted in AUTO_KEYS and raw.lower() == AUTO:
                return AUTO
            if dotted in AUTO_KEYS:
                return int(raw)
            if dotted in TUPLE_KEYS:
                return self._parse_tuples(raw, TUPLE_KEYS[dotted])
            if dotted in LIST_KEYS:
                kind = LIST_KEYS[dotted]
                return tuple(kind(part) for part in raw.split(",") if part.strip())
            if isinstance(default, bool):
                word = raw.lower()
                if word in TRUE_WORDS:
                    return True
                if word in FALSE_WORDS:
                    return False
                raise ValueError(f"expected true or false, got '{raw}'")
            if isinstance(default, int):
                return int(raw)
            if isinstance(default, float):
                return float(raw)
            return raw
        except ValueError as e:
            raise ConfigurationError(f"bad value for {dotted}: {e}", line, path)

    @staticmethod
    def _parse_tuples(raw: str, width: int) -> Tuple[Tuple[float, ...], ...]:
        items = []
        for chunk in raw.split(";"):
            if not chunk.strip():
                continue
            values = tuple(float(part) for part in chunk.split(","))
            if len(values) != width:
                raise ValueError(f"each entry needs {width} comma-separated numbers, got '{chunk.strip()}'")
            items.append(values)
        return tuple(items)

    def apply_overrides(self, overrides: Dict[str, str]) -> None:
        """Apply dotted 'section.key' -> raw string overrides on top of the file"""
        for dotted, raw in overrides.items():
            if "." not in dotted:
                raise ConfigurationError(f"override '{dotted}' must be written section.key")
            section, key = dotted.split(".", 1)
            if section not in SECTIONS:
                raise ConfigurationError(f"unknown section in override '{dotted}'")
            self.config[section][key] = self._parse_value(section, key, str(raw))
            logger.info(f"Override {dotted} = {raw}")

    def apply_sections(self, sections: Dict[str, Dict[str, Any]]) -> None:
        """Overwrite whole sections with stored values, e.g. the environment saved in a checkpoint"""
        for section, values in sections.items():
            if section not in SECTIONS:
                raise ConfigurationError(f"unknown section [{section}] in stored configuration")
            for key, value in values.items():
                self.config[section][key] = self._parse_value(section, key, self._format_value(_as_tuples(value)))

    # ==================== ACCESS METHODS ====================

    def get(self, dotted: str) -> Any:
        section, key = dotted.split(".", 1)
        return self.config[section][key]

    def world_config(self):
        from world.types import WorldConfig

        arena, lidar, goal = self.config["arena"], self.config["lidar"], self.config["goal"]
        return WorldConfig.walled_rectangle(
            width=arena["width"],
            height=arena["height"],
            obstacles=arena["obstacles"],
            extra_walls=arena["walls"],
            lidar_beams=lidar["beams"],
            lidar_max_range=lidar["max_range"],
            goal_radius=goal["radius"],
            goal_clearance=goal["clearance"],
            goal_min_robot_distance=goal["min_robot_distance"],
            episode_time_s=arena["episode_time_s"],
        )

    def robot_params(self):
        from world.types import RobotParams

        return RobotParams(**self.config["robot"])

    def reward_config(self):
        from world.types import RewardConfig

        return RewardConfig(**self.config["reward"])

    def variant(self):
        from agent.config import AgentVariant

        return AgentVariant.parse(self.config["experiment"]["variant"])

    def network_config(self):
        from neural.network import NetworkConfig

        net = self.config["network"]
        return NetworkConfig(
            obs_dim=self.config["lidar"]["beams"] + 2,
            seq_len=net["seq_len"],
            tdl_units=net["tdl_units"],
            gru_units=net["gru_units"],
            fc1_units=net["fc1_units"],
            n_actions=len(self.config["robot"]["angular_velocities"]),
            init_scheme=net["init_scheme"],
            init_seed=self.config["experiment"]["seed"] if net["init_seed"] == AUTO else net["init_seed"],
            family=self.variant().family,
            ff_units=None if net["ff_units"] == AUTO else net["ff_units"],
        )

    def agent_config(self):
        from agent.config import AgentConfig

        values = dict(self.config["agent"])
        if values["action_skip"] == AUTO:
            values["action_skip"] = self.variant().default_action_skip
        values["optimizer"] = self.config["network"]["optimizer"]
        values["learning_rate"] = self.config["network"]["learning_rate"]
        return AgentConfig(**values)

    def experiment_config(self) -> ExperimentConfig:
        """Typed, validated experiment; raises ConfigurationError listing every problem"""
        issues = self.validate_configuration()
        if issues["errors"]:
            raise ConfigurationError("; ".join(issues["errors"]))
        for warning in issues["warnings"]:
            logger.warning(warning)
        exp = self.config["experiment"]
        return ExperimentConfig(
            world=self.world_config(),
            robot=self.robot_params(),
            reward=self.reward_config(),
            network=self.network_config(),
            agent=self.agent_config(),
            variant=self.variant(),
            seed=exp["seed"],
            output_dir=exp["output_dir"],
            milestones=tuple(exp["milestones"]),
            respawn=self.config["goal"]["respawn"],
            random_spawn=exp["random_spawn"],
            eval_episodes=exp["eval_episodes"],
            eval_workers=exp["eval_workers"],
            log_every=exp["log_every"],
            source={name: dict(values) for name, values in self.config.items()},
        )

    # ==================== VALIDATION ====================

    def validate_configuration(self) -> Dict[str, List[str]]:
        """Validate current configuration and return issues"""
        issues = {
            "errors": [],
            "warnings": [],
            "suggestions": []
        }

        builders = [
            ("robot", self.robot_params),
            ("reward", self.reward_config),
            ("experiment.variant", self.variant),
            ("network", self.network_config),
            ("agent", self.agent_config),
        ]
        built = {}
        for label, builder in builders:
            try:
                built[label] = builder()
            except ConfigurationError as e:
                issues["errors"].append(f"[{label}] {e}")

        try:
            world = self.world_config()
            body_radius = self.config["robot"]["body_radius"]
            issues["errors"].extend(f"[arena] {p}" for p in world.problems(body_radius))
        except ConfigurationError as e:
            issues["errors"].append(f"[arena] {e}")

        exp = self.config["experiment"]
        if any(m < 1 for m in exp["milestones"]):
            issues["errors"].append("[experiment] milestones must be positive episode numbers")
        if exp["eval_episodes"] < 1 or exp["eval_workers"] < 1:
            issues["errors"].append("[experiment] eval_episodes and eval_workers must be >= 1")

        agent = built.get("agent")
        if agent is not None:
            expected_steps = self.config["arena"]["episode_time_s"] / self.config["robot"]["control_dt"]
            if agent.max_steps_per_episode < expected_steps - 1e-9:
                issues["warnings"].append(
                    f"max_steps_per_episode={agent.max_steps_per_episode} ends episodes before the "
                    f"{self.config['arena']['episode_time_s']} s time limit"
                )
            if agent.max_episodes and any(m > agent.max_episodes for m in exp["milestones"]):
                issues["suggestions"].append("some milestones lie beyond max_episodes and will never be written")
        if self.config["network"]["optimizer"] == "sgd" and self.config["network"]["learning_rate"] > 0.1:
            issues["warnings"].append("SGD with learning_rate > 0.1 usually diverges on this loss")

        return issues

    # ==================== SAVE METHODS ====================

    @staticmethod
    def _format_value(value: Any) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return repr(value)
        if isinstance(value, tuple):
            if value and isinstance(value[0], tuple):
                return "; ".join(", ".join(repr(float(v)) for v in item) for item in value)
            return ", ".join(repr(v) for v in value)
        return str(value)

    def to_text(self) -> str:
        lines = ["# Resolved configuration"]
        for section in SECTIONS:
            lines.append("")
            lines.append(f"[{section}]")
            for key, value in self.config[section].items():
                lines.append(f"{key} = {self._format_value(value)}")
        return "\n".join(lines) + "\n"

    def save_config(self, path: str) -> str:
        """Write the resolved configuration in the same key=value format"""
        from neural.checkpoint import atomic_write_text

        atomic_write_text(path, self.to_text())
        logger.info(f"Configuration saved to: {path}")
        return path

    # ==================== DEBUG METHODS ====================

    def get_config_summary(self) -> Dict[str, Any]:
        """Get summary of current configuration for debugging"""
        return {
            "config_source": self.config_path or "defaults",
            "variant": self.config["experiment"]["variant"],
            "seed": self.config["experiment"]["seed"],
            "episodes": self.config["agent"]["max_episodes"],
            "action_skip": self.config["agent"]["action_skip"],
            "arena": f"{self.config['arena']['width']} x {self.config['arena']['height']} m, "
                     f"{len(self.config['arena']['obstacles'])} obstacles",
            "reward_mode": self.config["reward"]["mode"],
        }
