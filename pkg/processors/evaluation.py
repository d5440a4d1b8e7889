"""
Greedy evaluation protocol

Each evaluation episode i draws its generator from (seed, EVAL_STREAM, i), so
splitting episodes across worker processes gives the same records as a serial
run. Episodes run with epsilon 0, the goal does not respawn, and nothing is
stored or trained.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from agent.config import AgentConfig, AgentVariant
from agent.training import Agent, run_episode
from core.config_manager import ConfigManager, ExperimentConfig
from core.errors import ConfigurationError
from core.records import METRICS_VERSION, EpisodeRecord, EvalSummary
from core.seeding import EVAL_STREAM, derive_rng
from neural.checkpoint import Checkpoint, atomic_write_text
from neural.network import QNetwork

logger = logging.getLogger(__name__)


def evaluation_agent_config(base: AgentConfig, checkpoint: Checkpoint) -> AgentConfig:
    """The checkpoint's skip settings and episode bound on top of the experiment's agent config"""
    meta = checkpoint.metadata
    return replace(
        base,
        action_skip=int(meta.get('action_skip', base.action_skip)),
        skip_gates_exploration=bool(meta.get('skip_gates_exploration', base.skip_gates_exploration)),
        max_steps_per_episode=int(meta.get('max_steps_per_episode', base.max_steps_per_episode)),
    )


def checkpoint_experiment(checkpoint: Checkpoint, config_path: Optional[str] = None,
                          overrides: Optional[Dict[str, str]] = None) -> ExperimentConfig:
    """Experiment for evaluating a checkpoint in the environment it was trained in

    Layering: defaults, the config file, the environment sections stored in the
    checkpoint, then dotted overrides.
    """
    cm = ConfigManager(config_path)
    environment = checkpoint.metadata.get('environment')
    if environment:
        cm.apply_sections(environment)
    else:
        logger.warning("Checkpoint carries no environment; using the given configuration")
    if overrides:
        cm.apply_overrides(overrides)
    return cm.experiment_config()


def checkpoint_variant(checkpoint: Checkpoint, default: AgentVariant) -> AgentVariant:
    value = checkpoint.metadata.get('variant')
    return AgentVariant.parse(value) if value else default


def _evaluate_episodes(network: QNetwork, experiment, agent_config: AgentConfig, variant: AgentVariant,
                       seed: int, indices: Sequence[int]) -> List[EpisodeRecord]:
    agent = Agent(network, agent_config, variant, learn=False)
    env = experiment.make_env(respawn=False)
    records = []
    for i in indices:
        rng = derive_rng(seed, EVAL_STREAM, i)
        records.append(run_episode(env, agent, rng, epsilon=0.0, episode=i + 1))
    return records


def _evaluate_chunk(payload) -> List[EpisodeRecord]:
    return _evaluate_episodes(*payload)


def evaluate(
    checkpoint: Checkpoint,
    experiment,
    n_episodes: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    label: Optional[str] = None,
) -> EvalSummary:
    """Run n_episodes greedy episodes of the checkpoint's policy and aggregate them"""
    n_episodes = experiment.eval_episodes if n_episodes is None else n_episodes
    seed = experiment.seed if seed is None else seed
    workers = experiment.eval_workers if workers is None else workers
    if n_episodes < 1:
        raise ConfigurationError(f"need at least one evaluation episode, got {n_episodes}")
    if workers < 1:
        raise ConfigurationError(f"need at least one evaluation worker, got {workers}")
    variant = checkpoint_variant(checkpoint, experiment.variant)
    agent_config = evaluation_agent_config(experiment.agent, checkpoint)
    # private copy: evaluation never touches the caller's parameters
    network = checkpoint.network.copy()

    logger.info(
        f"Evaluating {label or variant.value}: {n_episodes} episodes, K={agent_config.action_skip}, "
        f"seed {seed}, {workers} worker(s)"
    )
    if workers <= 1 or n_episodes <= 1:
        records = _evaluate_episodes(network, experiment, agent_config, variant, seed, range(n_episodes))
    else:
        chunks = [list(map(int, c)) for c in np.array_split(np.arange(n_episodes), min(workers, n_episodes))]
        payloads = [(network, experiment, agent_config, variant, seed, chunk) for chunk in chunks]
        with ProcessPoolExecutor(max_workers=len(chunks)) as ex:
            records = [record for chunk in ex.map(_evaluate_chunk, payloads) for record in chunk]

    return EvalSummary.from_records(
        records,
        checkpoint=label,
        metadata={
            'variant': variant.value,
            'action_skip': agent_config.action_skip,
            'training_episode': checkpoint.metadata.get('episode'),
            'training_seed': checkpoint.metadata.get('seed'),
            'eval_seed': seed,
            'metrics_version': METRICS_VERSION,
        },
    )


def write_summary(path: str, summary: EvalSummary) -> str:
    atomic_write_text(path, json.dumps(summary.to_dict(), indent=2) + '\n')
    logger.info(f"Evaluation summary saved to: {path}")
    return path


def summary_table(summaries: List[EvalSummary]) -> pd.DataFrame:
    """One row per evaluated checkpoint"""
    return pd.DataFrame([
        {
            'checkpoint': s.checkpoint,
            'variant': s.metadata.get('variant'),
            'episode': s.metadata.get('training_episode'),
            'episodes': s.n_episodes,
            'success_rate': s.success_rate,
            'avg_time_to_goal_s': s.avg_time_to_goal_s,
        }
        for s in summaries
    ])


def display_summary(summaries: List[EvalSummary]) -> None:
    print("\n🎯 EVALUATION SUMMARY")
    print("=" * 40)
    table = summary_table(summaries)
    table["success_rate"] = table["success_rate"].map(lambda v: f"{v * 100:.0f}%")
    table["avg_time_to_goal_s"] = table["avg_time_to_goal_s"].map(lambda v: f"{v:.1f} s" if pd.notna(v) else "n/a")
    print(table.to_string(index=False))
