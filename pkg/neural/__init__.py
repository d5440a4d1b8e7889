"""
Numerical core: dense and GRU layers with exact gradients, Q-networks, optimizers
"""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .gradcheck import GradCheckReport, gradient_check
from .layers import GruParams, dense_backward, dense_forward, gru_backward, gru_forward
from .network import FEEDFORWARD, RECURRENT, NetworkConfig, QNetwork, backward_q, forward_q
from .optimizers import SGD, Adam, AdamState, adam_step, make_optimizer

__all__ = [
    'Checkpoint', 'load_checkpoint', 'save_checkpoint',
    'GradCheckReport', 'gradient_check',
    'GruParams', 'dense_backward', 'dense_forward', 'gru_backward', 'gru_forward',
    'FEEDFORWARD', 'RECURRENT', 'NetworkConfig', 'QNetwork', 'backward_q', 'forward_q',
    'SGD', 'Adam', 'AdamState', 'adam_step', 'make_optimizer',
]
