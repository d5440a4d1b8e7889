"""
Static HTML training report: reward and max-Q curves per episode
"""

import logging
import os
from typing import Dict, List, Optional, Sequence

import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from neural.checkpoint import atomic_write_text
from processors.metrics import load_metrics_frame, window_summary

logger = logging.getLogger(__name__)

COLORS = ['#636EFA', '#EF553B', '#00CC96', '#AB63FA', '#FFA15A', '#19D3F3']


def _label_for(path: str) -> str:
    directory = os.path.basename(os.path.dirname(os.path.abspath(path)))
    return directory or os.path.basename(path)


def load_runs(paths: Sequence[str], labels: Optional[Sequence[str]] = None) -> Dict[str, pd.DataFrame]:
    labels = list(labels) if labels else [_label_for(p) for p in paths]
    if len(labels) != len(paths):
        raise ValueError("need one label per metrics file")
    return {label: load_metrics_frame(path) for label, path in zip(labels, paths)}


def create_training_figure(runs: Dict[str, pd.DataFrame], window: int = 50) -> go.Figure:
    """Total reward and mean max-Q per episode, raw and rolling mean"""
    fig = make_subplots(
        rows=2, cols=1, shared_xaxes=True, vertical_spacing=0.08,
        subplot_titles=("Total reward per episode", "Mean max Q per episode"),
    )
    for i, (label, df) in enumerate(runs.items()):
        color = COLORS[i % len(COLORS)]
        for row, column in ((1, 'total_reward'), (2, 'mean_max_q')):
            fig.add_trace(go.Scatter(
                x=df['episode'], y=df[column], mode='lines', name=label,
                line=dict(color=color, width=1), opacity=0.3,
                legendgroup=label, showlegend=False,
            ), row=row, col=1)
            fig.add_trace(go.Scatter(
                x=df['episode'], y=df[column].rolling(window, min_periods=1).mean(), mode='lines',
                name=f"{label} ({window}-episode mean)", line=dict(color=color, width=2.5),
                legendgroup=label, showlegend=row == 1,
            ), row=row, col=1)

    fig.update_layout(height=800, hovermode='x unified', template='plotly_white')
    fig.update_xaxes(title_text="Episode", row=2, col=1)
    fig.update_yaxes(title_text="Reward", row=1, col=1)
    fig.update_yaxes(title_text="Q", row=2, col=1)
    return fig


def create_success_table(runs: Dict[str, pd.DataFrame], window: int = 50) -> go.Figure:
    frames: List[pd.DataFrame] = []
    for label, df in runs.items():
        summary = window_summary(df, window)
        summary.insert(0, 'run', label)
        frames.append(summary)
    table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
    fig = go.Figure(data=[go.Table(
        header=dict(values=["Run", "Episodes", "Goal reached", "Collision", "Mean reward"],
                    fill_color='paleturquoise', align='left'),
        cells=dict(values=[
            table.get('run', []),
            [f"{a}-{b}" for a, b in zip(table.get('first_episode', []), table.get('last_episode', []))],
            [f"{v * 100:.0f}%" for v in table.get('goal_fraction', [])],
            [f"{v * 100:.0f}%" for v in table.get('collision_fraction', [])],
            [f"{v:+.1f}" for v in table.get('mean_reward', [])],
        ], align='left'),
    )])
    fig.update_layout(title=f"Outcomes per {window} episodes", template='plotly_white')
    return fig


def write_report(paths: Sequence[str], out_path: str, window: int = 50, labels: Optional[Sequence[str]] = None) -> str:
    runs = load_runs(paths, labels)
    curves = create_training_figure(runs, window)
    table = create_success_table(runs, window)
    html = "\n".join([
        "<html><head><meta charset=\"utf-8\"><title>Training report</title></head><body>",
        curves.to_html(full_html=False, include_plotlyjs='cdn'),
        table.to_html(full_html=False, include_plotlyjs=False),
        "</body></html>",
    ])
    atomic_write_text(out_path, html)
    logger.info(f"Report with {len(runs)} run(s) saved to: {out_path}")
    return out_path
