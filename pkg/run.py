#!/usr/bin/env python3
"""
LiDAR Navigation Trainer - Main Launcher
Train, evaluate and inspect DQN / DQN+GRU / DQN+GRU+skip navigation agents

    python run.py train --variant dqn-gru-skip --episodes 3000 --seed 7
    python run.py eval --checkpoint runs/default/checkpoint_ep3000.json --episodes 100 --seed 11
    python run.py gradcheck --trials 200
    python run.py rollout --checkpoint runs/default/checkpoint.json --seed 3
    python run.py report --metrics runs/dqn/metrics.csv runs/dqn-gru-skip/metrics.csv

Every verb accepts --config <file> and dotted overrides such as --agent.action_skip 10.
Exit codes: 0 success, 1 invalid input, 2 runtime or numerical failure.
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional, Tuple

# Ensure we can import from the project
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

from core.config_manager import ConfigManager
from core.errors import CheckpointVersionError, ConfigurationError, NavigationError

logger = logging.getLogger("run")

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_RUNTIME_FAILURE = 2


class CliParser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigurationError (exit 1) instead of exiting 2"""

    def error(self, message):
        raise ConfigurationError(f"{self.prog}: {message}")


def split_overrides(extra: List[str]) -> Dict[str, str]:
    """Turn ['--agent.action_skip', '10', '--goal.respawn=false'] into a dotted-key dict"""
    overrides = {}
    i = 0
    while i < len(extra):
        token = extra[i]
        if not token.startswith("--") or "." not in token:
            raise ConfigurationError(f"unrecognized argument '{token}'")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            if i + 1 >= len(extra):
                raise ConfigurationError(f"override '{token}' needs a value")
            value = extra[i + 1]
            i += 1
        overrides[key] = value
        i += 1
    return overrides


def build_parser() -> CliParser:
    parser = CliParser(prog="run.py", description="LiDAR navigation DQN trainer")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)

    def with_config(sub):
        sub.add_argument("--config", help="key=value configuration file")
        return sub

    train = with_config(commands.add_parser("train", help="train one agent variant"))
    train.add_argument("--variant", help="dqn | dqn-gru | dqn-gru-skip")
    train.add_argument("--episodes", type=int, help="number of training episodes")
    train.add_argument("--seed", type=int)
    train.add_argument("--out", help="output directory")

    evaluate = with_config(commands.add_parser("eval", help="greedy evaluation of checkpoints"))
    evaluate.add_argument("--checkpoint", nargs="+", required=True)
    evaluate.add_argument("--episodes", type=int, help="evaluation episodes per checkpoint")
    evaluate.add_argument("--seed", type=int)
    evaluate.add_argument("--workers", type=int)
    evaluate.add_argument("--out", help="summary JSON path (single checkpoint only)")

    gradcheck = with_config(commands.add_parser("gradcheck", help="finite-difference gradient check"))
    gradcheck.add_argument("--variant")
    gradcheck.add_argument("--trials", type=int, default=200)
    gradcheck.add_argument("--eps", type=float, default=1e-5)
    gradcheck.add_argument("--seed", type=int, default=0)
    gradcheck.add_argument("--inject-fault", action="store_true", help="corrupt the analytic gradients")

    rollout = with_config(commands.add_parser("rollout", help="record one greedy episode"))
    rollout.add_argument("--checkpoint", required=True)
    rollout.add_argument("--seed", type=int)
    rollout.add_argument("--out", help="trajectory CSV path")

    report = commands.add_parser("report", help="HTML report of training curves")
    report.add_argument("--metrics", nargs="+", required=True)
    report.add_argument("--labels", nargs="+")
    report.add_argument("--window", type=int, default=50)
    report.add_argument("--out", default="report.html")
    return parser


def load_config(args, overrides: Dict[str, str], shorthands: Dict[str, str]) -> ConfigManager:
    for attr, dotted in shorthands.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides.setdefault(dotted, str(value))
    return ConfigManager(args.config, overrides)


def load_checkpoint_file(path: str):
    from neural.checkpoint import load_checkpoint

    if not os.path.exists(path):
        raise ConfigurationError(f"checkpoint not found: {path}")
    return load_checkpoint(path)


# ==================== COMMANDS ====================

def cmd_train(args, overrides: Dict[str, str]) -> int:
    from agent.training import train
    from neural.checkpoint import save_checkpoint
    from processors.metrics import display_summary, write_metrics

    cm = load_config(args, overrides, {
        "variant": "experiment.variant",
        "episodes": "agent.max_episodes",
        "seed": "experiment.seed",
        "out": "experiment.output_dir",
    })
    experiment = cm.experiment_config()
    out_dir = experiment.output_dir
    os.makedirs(out_dir, exist_ok=True)
    cm.save_config(os.path.join(out_dir, "config.resolved.conf"))
    metrics_path = os.path.join(out_dir, "metrics.csv")

    print(f"🚀 Training {experiment.variant.value} for {experiment.agent.max_episodes} episodes (seed {experiment.seed})")
    result = train(experiment, on_milestone=lambda episode, records: write_metrics(metrics_path, records))
    write_metrics(metrics_path, result.records)
    save_checkpoint(os.path.join(out_dir, "checkpoint.json"), result.checkpoint)

    display_summary(result.records)
    print(f"\n💾 Metrics: {metrics_path}")
    for path in result.milestone_paths:
        print(f"💾 Milestone checkpoint: {path}")
    print("✅ Training complete!")
    return EXIT_OK


def cmd_eval(args, overrides: Dict[str, str]) -> int:
    from processors.evaluation import checkpoint_experiment, display_summary, evaluate, write_summary

    summaries = []
    for path in args.checkpoint:
        checkpoint = load_checkpoint_file(path)
        experiment = checkpoint_experiment(checkpoint, args.config, overrides)
        summary = evaluate(checkpoint, experiment, args.episodes, args.seed, args.workers, label=path)
        if args.out and len(args.checkpoint) == 1:
            out = args.out
        elif len(args.checkpoint) == 1:
            out = os.path.join(os.path.dirname(os.path.abspath(path)), "summary.json")
        else:
            stem = os.path.splitext(os.path.basename(path))[0]
            out = os.path.join(os.path.dirname(os.path.abspath(path)), f"summary_{stem}.json")
        write_summary(out, summary)
        summaries.append(summary)
        print(f"💾 Summary: {out}")

    display_summary(summaries)
    return EXIT_OK


def cmd_gradcheck(args, overrides: Dict[str, str]) -> int:
    import numpy as np

    from neural.gradcheck import gradient_check
    from neural.network import QNetwork

    cm = load_config(args, overrides, {"variant": "experiment.variant"})
    issues = cm.validate_configuration()
    if issues["errors"]:
        raise ConfigurationError("; ".join(issues["errors"]))
    network = QNetwork(cm.network_config())

    def corrupt(grads):
        for g in grads.values():
            g += 1.0

    print(f"🔍 Gradient check: {network.parameter_count():,} parameters, {args.trials} coordinates, eps {args.eps:g}")
    report = gradient_check(
        network, trials=args.trials, eps=args.eps, rng=np.random.default_rng(args.seed),
        grad_hook=corrupt if args.inject_fault else None,
    )
    print(f"   checked {report.checked}, skipped {report.skipped_kinks} rectifier kinks")
    print(f"   max relative error {report.max_relative_error:.3e} ({report.worst_parameter or '-'})")
    if report.passed():
        print("✅ PASS")
        return EXIT_OK
    print("❌ FAIL: max relative error >= 1e-5")
    return EXIT_RUNTIME_FAILURE


def cmd_rollout(args, overrides: Dict[str, str]) -> int:
    from processors.evaluation import checkpoint_experiment
    from processors.rollout import rollout, write_trajectory

    checkpoint = load_checkpoint_file(args.checkpoint)
    experiment = checkpoint_experiment(checkpoint, args.config, overrides)
    trajectory = rollout(checkpoint, experiment, args.seed)
    out = args.out or os.path.join(os.path.dirname(os.path.abspath(args.checkpoint)), "trajectory.csv")
    write_trajectory(out, trajectory)
    final = trajectory["status"].iloc[-1] if len(trajectory) else "n/a"
    print(f"💾 Trajectory ({len(trajectory)} steps, final status {final}): {out}")
    return EXIT_OK


def cmd_report(args, overrides: Dict[str, str]) -> int:
    from processors.report import write_report

    if overrides:
        raise ConfigurationError("report takes no configuration overrides")
    for path in args.metrics:
        if not os.path.exists(path):
            raise ConfigurationError(f"metrics file not found: {path}")
    if args.window < 1:
        raise ConfigurationError("--window must be >= 1")
    if args.labels and len(args.labels) != len(args.metrics):
        raise ConfigurationError("need one --labels entry per metrics file")
    write_report(args.metrics, args.out, args.window, args.labels)
    print(f"📊 Report: {args.out}")
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "gradcheck": cmd_gradcheck,
    "rollout": cmd_rollout,
    "report": cmd_report,
}


def parse_args(argv: Optional[List[str]] = None) -> Tuple[argparse.Namespace, Dict[str, str]]:
    args, extra = build_parser().parse_known_args(argv)
    return args, split_overrides(extra)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args, overrides = parse_args(argv)
    except ConfigurationError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args, overrides)
    except (ConfigurationError, CheckpointVersionError) as e:
        print(f"❌ Invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except NavigationError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME_FAILURE
    except OSError as e:
        print(f"❌ File error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except KeyboardInterrupt:
        print("\n⏹️  Stopped by user")
        return EXIT_RUNTIME_FAILURE


if __name__ == "__main__":
    sys.exit(main())
