"""
Episode and training loops
"""

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from agent.config import AgentConfig, AgentVariant, epsilon_for_episode
from agent.dqn import select_action, sync_target, train_step
from agent.replay import ReplayBuffer, Transition
from core.config_manager import ENVIRONMENT_SECTIONS
from core.errors import TrainingDivergenceError
from core.records import EpisodeRecord
from core.seeding import REPLAY_STREAM, TRAIN_ENV_STREAM, TRAIN_POLICY_STREAM, derive_rng
from neural.checkpoint import Checkpoint, save_checkpoint
from neural.network import QNetwork
from neural.optimizers import make_optimizer
from world.types import Status

logger = logging.getLogger(__name__)


class Agent:
    """Online and target networks plus, when learning, optimizer and replay memory"""

    def __init__(
        self,
        network: QNetwork,
        config: AgentConfig,
        variant: AgentVariant = AgentVariant.DQN_GRU_SKIP,
        learn: bool = True,
        replay_rng: Optional[np.random.Generator] = None,
        optimizer=None,
    ):
        self.online = network
        self.target = network.copy()
        self.config = config
        self.variant = variant
        self.learn = learn
        self.optimizer = (optimizer or make_optimizer(config.optimizer, config.learning_rate)) if learn else None
        self.buffer = ReplayBuffer(config.replay_capacity, replay_rng) if learn else None
        self.total_steps = 0
        self.updates = 0
        self.syncs = 0
        self.last_loss: Optional[float] = None

    @property
    def seq_len(self) -> int:
        return self.online.config.seq_len

    def observe(self, transition: Transition) -> Optional[float]:
        """Store a transition, train and sync on schedule; returns the loss when an update ran"""
        self.buffer.push(transition)
        self.total_steps += 1
        loss = None
        cfg = self.config
        if len(self.buffer) >= max(cfg.learning_start, cfg.batch_size) and self.total_steps % cfg.train_every == 0:
            loss = train_step(self.online, self.target, self.buffer, self.optimizer, cfg)
            if loss is not None:
                self.updates += 1
                self.last_loss = loss
        if self.total_steps % cfg.target_update_interval == 0:
            sync_target(self.online, self.target)
            self.syncs += 1
        return loss


def prime_window(observation: np.ndarray, seq_len: int) -> np.ndarray:
    """Initial window: the first observation repeated seq_len times"""
    return np.repeat(np.asarray(observation, dtype=np.float64)[None], seq_len, axis=0)


def push_observation(window: np.ndarray, observation: np.ndarray) -> np.ndarray:
    return np.concatenate([window[1:], np.asarray(observation, dtype=np.float64)[None]], axis=0)


def run_episode(
    env,
    agent: Agent,
    rng: np.random.Generator,
    epsilon: float,
    episode: int = 0,
    env_rng: Optional[np.random.Generator] = None,
    step_callback: Optional[Callable[[int, int, object], None]] = None,
) -> EpisodeRecord:
    """Roll out one episode; with agent.learn the agent stores and trains on every step"""
    cfg = agent.config
    window = prime_window(env.reset(env_rng if env_rng is not None else rng), agent.seq_len)
    prev_action = None
    total_reward = 0.0
    max_qs = []

    for t in range(1, cfg.max_steps_per_episode + 1):
        q = agent.online.q_values(window)
        max_qs.append(float(np.max(q)))
        action = select_action(q, t, epsilon, prev_action, cfg.action_skip, rng, cfg.skip_gates_exploration)
        outcome = env.step(action)
        next_window = push_observation(window, outcome.observation.values)
        if agent.learn:
            agent.observe(Transition(window, action, outcome.reward, next_window, env.terminal))
        if step_callback is not None:
            step_callback(t, action, outcome)
        total_reward += outcome.reward
        window, prev_action = next_window, action
        if env.done:
            break

    outcome_label = env.status.value if env.done else Status.TIMEOUT.value
    return EpisodeRecord(
        episode=episode,
        steps=env.steps,
        outcome=outcome_label,
        total_reward=total_reward,
        mean_max_q=float(np.mean(max_qs)),
        epsilon=epsilon,
        sim_time_s=env.elapsed,
        time_to_goal_s=env.first_goal_time,
    )


@dataclass
class TrainingResult:
    checkpoint: Checkpoint
    records: List[EpisodeRecord] = field(default_factory=list)
    milestone_paths: List[str] = field(default_factory=list)


def build_network(experiment) -> QNetwork:
    return QNetwork(replace(experiment.network, family=experiment.variant.family))


def environment_metadata(experiment) -> dict:
    """Resolved arena, robot, sensor, reward and goal sections the policy was trained in"""
    source = getattr(experiment, "source", None)
    if not source:
        return {}
    return {"environment": {section: dict(source[section]) for section in ENVIRONMENT_SECTIONS}}


def make_checkpoint(agent: Agent, experiment, episode: int, epsilon: float, policy_rng: np.random.Generator) -> Checkpoint:
    return Checkpoint(
        network=agent.online.copy(),
        optimizer=agent.optimizer,
        rng_state={"policy": policy_rng.bit_generator.state, "replay": agent.buffer.rng.bit_generator.state},
        metadata={
            "variant": agent.variant.value,
            "action_skip": agent.config.action_skip,
            "skip_gates_exploration": agent.config.skip_gates_exploration,
            "max_steps_per_episode": agent.config.max_steps_per_episode,
            "episode": episode,
            "epsilon": epsilon,
            "total_steps": agent.total_steps,
            "seed": experiment.seed,
            **environment_metadata(experiment),
        },
    )


def train(
    experiment,
    env=None,
    on_record: Optional[Callable[[EpisodeRecord], None]] = None,
    on_milestone: Optional[Callable[[int, List[EpisodeRecord]], None]] = None,
) -> TrainingResult:
    """Run max_episodes episodes of deep Q-learning

    experiment is a core.config_manager.ExperimentConfig. env defaults to the
    navigation environment it describes. Milestone checkpoints go to
    experiment.output_dir when it is set.
    """
    cfg = experiment.agent
    if env is None:
        env = experiment.make_env()
    network = build_network(experiment)
    agent = Agent(network, cfg, experiment.variant, learn=True, replay_rng=derive_rng(experiment.seed, REPLAY_STREAM))
    policy_rng = derive_rng(experiment.seed, TRAIN_POLICY_STREAM)
    milestones = set(experiment.milestones)
    result = TrainingResult(checkpoint=None)

    logger.info(
        f"Training {experiment.variant.value}: {cfg.max_episodes} episodes, K={cfg.action_skip}, "
        f"{network.parameter_count():,} parameters, seed {experiment.seed}"
    )

    epsilon = cfg.epsilon_start
    for episode in range(1, cfg.max_episodes + 1):
        epsilon = epsilon_for_episode(cfg, episode - 1)
        try:
            record = run_episode(env, agent, policy_rng, epsilon, episode, derive_rng(experiment.seed, TRAIN_ENV_STREAM, episode))
        except TrainingDivergenceError as e:
            logger.error(f"Training diverged in episode {episode}: {e}")
            if experiment.output_dir:
                path = os.path.join(experiment.output_dir, f"diverged_episode_{episode}.json")
                save_checkpoint(path, make_checkpoint(agent, experiment, episode, epsilon, policy_rng))
            if on_milestone is not None:
                on_milestone(episode, result.records)
            raise

        result.records.append(record)
        if on_record is not None:
            on_record(record)
        if experiment.log_every and episode % experiment.log_every == 0:
            loss_text = f"{agent.last_loss:.4f}" if agent.last_loss is not None else "n/a"
            logger.info(
                f"Episode {episode}: {record.outcome}, steps {record.steps}, reward {record.total_reward:+.1f}, "
                f"eps {epsilon:.3f}, mean max Q {record.mean_max_q:.3f}, "
                f"{agent.updates} updates, {agent.syncs} target syncs, last loss {loss_text}"
            )

        if episode in milestones:
            checkpoint = make_checkpoint(agent, experiment, episode, epsilon, policy_rng)
            if experiment.output_dir:
                path = os.path.join(experiment.output_dir, f"checkpoint_ep{episode}.json")
                result.milestone_paths.append(save_checkpoint(path, checkpoint))
            if on_milestone is not None:
                on_milestone(episode, result.records)

        if cfg.max_total_steps and agent.total_steps >= cfg.max_total_steps:
            logger.info(f"Step budget of {cfg.max_total_steps} reached after {episode} episodes")
            break

    result.checkpoint = make_checkpoint(agent, experiment, len(result.records), epsilon, policy_rng)
    return result
