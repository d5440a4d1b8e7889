"""
Per-episode metrics and evaluation summaries
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

METRICS_VERSION = 1
METRICS_COLUMNS = [
    'episode', 'steps', 'outcome', 'total_reward', 'mean_max_q', 'epsilon', 'sim_time_s', 'time_to_goal_s',
]
OUTCOMES = ('goal', 'collision', 'timeout')


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    steps: int
    outcome: str
    total_reward: float
    mean_max_q: float
    epsilon: float
    sim_time_s: float
    time_to_goal_s: Optional[float] = None

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_row(cls, row: Dict[str, Any]) -> 'EpisodeRecord':
        goal_time = row.get('time_to_goal_s')
        if goal_time is None or (isinstance(goal_time, float) and math.isnan(goal_time)) or goal_time == '':
            goal_time = None
        return cls(
            episode=int(row['episode']),
            steps=int(row['steps']),
            outcome=str(row['outcome']),
            total_reward=float(row['total_reward']),
            mean_max_q=float(row['mean_max_q']),
            epsilon=float(row['epsilon']),
            sim_time_s=float(row['sim_time_s']),
            time_to_goal_s=None if goal_time is None else float(goal_time),
        )

    @property
    def succeeded(self) -> bool:
        return self.outcome == 'goal'


@dataclass
class EvalSummary:
    n_episodes: int
    success_rate: float
    avg_time_to_goal_s: Optional[float]
    records: List[EpisodeRecord] = field(default_factory=list)
    checkpoint: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: List[EpisodeRecord], **kwargs) -> 'EvalSummary':
        successes = [r for r in records if r.succeeded]
        goal_times = [r.time_to_goal_s for r in successes if r.time_to_goal_s is not None]
        return cls(
            n_episodes=len(records),
            success_rate=(len(successes) / len(records)) if records else 0.0,
            avg_time_to_goal_s=(sum(goal_times) / len(goal_times)) if goal_times else None,
            records=list(records),
            **kwargs,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_episodes': self.n_episodes,
            'success_rate': self.success_rate,
            'avg_time_to_goal_s': self.avg_time_to_goal_s,
            'checkpoint': self.checkpoint,
            'metadata': self.metadata,
            'records': [r.to_row() for r in self.records],
        }
