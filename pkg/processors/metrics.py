"""
Per-episode metrics table (metrics.csv)
"""

import logging
import os
from typing import Iterable, List

import pandas as pd

from core.errors import ConfigurationError
from core.records import METRICS_COLUMNS, EpisodeRecord
from neural.checkpoint import atomic_write_text

logger = logging.getLogger(__name__)


def records_frame(records: Iterable[EpisodeRecord]) -> pd.DataFrame:
    df = pd.DataFrame([r.to_row() for r in records], columns=METRICS_COLUMNS)
    df['time_to_goal_s'] = pd.to_numeric(df['time_to_goal_s'], errors='coerce')
    return df


def metrics_to_csv(records: Iterable[EpisodeRecord]) -> str:
    return records_frame(records).to_csv(index=False, lineterminator='\n')


def write_metrics(path: str, records: Iterable[EpisodeRecord]) -> str:
    """Rewrite the whole metrics file atomically"""
    atomic_write_text(path, metrics_to_csv(records))
    return path


def load_metrics_frame(path: str) -> pd.DataFrame:
    if not os.path.exists(path):
        raise ConfigurationError(f"metrics file not found: {path}")
    df = pd.read_csv(path, float_precision='round_trip')
    if list(df.columns) != METRICS_COLUMNS:
        raise ConfigurationError(
            f"{path}: unexpected metrics header {list(df.columns)} (expected {METRICS_COLUMNS})"
        )
    return df


def read_metrics(path: str) -> List[EpisodeRecord]:
    df = load_metrics_frame(path)
    return [EpisodeRecord.from_row(row) for row in df.to_dict(orient='records')]


def window_summary(df: pd.DataFrame, window: int = 50) -> pd.DataFrame:
    """Goal fraction, collision fraction and mean reward per block of `window` episodes"""
    blocks = (df['episode'] - 1) // window
    grouped = df.assign(
        block=blocks,
        reached=df['time_to_goal_s'].notna(),
        collided=df['outcome'] == 'collision',
    ).groupby('block')
    summary = pd.DataFrame({
        'first_episode': grouped['episode'].min(),
        'last_episode': grouped['episode'].max(),
        'goal_fraction': grouped['reached'].mean(),
        'collision_fraction': grouped['collided'].mean(),
        'mean_reward': grouped['total_reward'].mean(),
        'mean_max_q': grouped['mean_max_q'].mean(),
    })
    return summary.reset_index(drop=True)


def display_summary(records: List[EpisodeRecord]) -> None:
    """Print a short training summary"""
    if not records:
        print("ℹ️  No episodes recorded")
        return
    df = records_frame(records)
    outcomes = df['outcome'].value_counts()
    print("\n📈 TRAINING SUMMARY")
    print("=" * 40)
    print(f"Episodes: {len(df):,}")
    print(f"Total steps: {int(df['steps'].sum()):,}")
    for outcome, count in outcomes.items():
        print(f"  {outcome}: {count:,} ({count / len(df) * 100:.1f}%)")
    print(f"Episodes reaching a goal: {int(df['time_to_goal_s'].notna().sum()):,}")
    tail = df.tail(min(len(df), 100))
    print(f"Mean reward (last {len(tail)}): {tail['total_reward'].mean():+.2f}")
    print(f"Mean max Q (last {len(tail)}): {tail['mean_max_q'].mean():.3f}")
