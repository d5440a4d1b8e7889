"""
Processors module: metrics tables, evaluation, rollouts and reports
"""

from .evaluation import evaluate, write_summary
from .metrics import read_metrics, write_metrics
from .rollout import rollout, write_trajectory

__all__ = ['evaluate', 'write_summary', 'read_metrics', 'write_metrics', 'rollout', 'write_trajectory']
