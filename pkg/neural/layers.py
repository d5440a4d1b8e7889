"""
Dense and GRU layers with hand-written backward passes

Arrays are float64. Dense layers accept any number of leading batch axes.
The GRU accepts a single sequence (seq_len, input) or a batch
(batch, seq_len, input).
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from core.errors import DimensionError

GRU_NAMES = ('W_z', 'U_z', 'b_z', 'W_r', 'U_r', 'b_r', 'W_h', 'U_h', 'b_h')


def sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form never overflows
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def dense_forward(W: np.ndarray, b: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, tuple]:
    """y = W x + b over the last axis of x"""
    if W.ndim != 2 or b.shape != (W.shape[0],):
        raise DimensionError(f"dense layer expects W (out, in) and b (out,), got {W.shape} and {b.shape}")
    if x.shape[-1] != W.shape[1]:
        raise DimensionError(f"dense layer expects input width {W.shape[1]}, got {x.shape}")
    return x @ W.T + b, (W, x)


def dense_backward(cache: tuple, dy: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    W, x = cache
    if dy.shape != x.shape[:-1] + (W.shape[0],):
        raise DimensionError(f"dense backward expects dy of shape {x.shape[:-1] + (W.shape[0],)}, got {dy.shape}")
    x2 = x.reshape(-1, W.shape[1])
    dy2 = dy.reshape(-1, W.shape[0])
    return dy2.T @ x2, dy2.sum(axis=0), dy @ W


@dataclass
class GruParams:
    W_z: np.ndarray
    U_z: np.ndarray
    b_z: np.ndarray
    W_r: np.ndarray
    U_r: np.ndarray
    b_r: np.ndarray
    W_h: np.ndarray
    U_h: np.ndarray
    b_h: np.ndarray

    def __post_init__(self):
        hidden, inputs = self.W_z.shape
        for name in GRU_NAMES:
            expected = {'W': (hidden, inputs), 'U': (hidden, hidden), 'b': (hidden,)}[name[0]]
            if getattr(self, name).shape != expected:
                raise DimensionError(f"GRU {name} has shape {getattr(self, name).shape}, expected {expected}")

    @property
    def hidden_size(self) -> int:
        return self.W_z.shape[0]

    @property
    def input_size(self) -> int:
        return self.W_z.shape[1]

    @classmethod
    def from_dict(cls, params: Dict[str, np.ndarray], prefix: str = '') -> 'GruParams':
        return cls(**{name: params[prefix + name] for name in GRU_NAMES})

    @classmethod
    def zeros(cls, input_size: int, hidden_size: int) -> 'GruParams':
        shapes = {'W': (hidden_size, input_size), 'U': (hidden_size, hidden_size), 'b': (hidden_size,)}
        return cls(**{name: np.zeros(shapes[name[0]]) for name in GRU_NAMES})


def gru_forward(params: GruParams, x_seq: np.ndarray, h0: Optional[np.ndarray] = None) -> Tuple[np.ndarray, dict]:
    """Unroll the GRU over x_seq; returns every hidden state and a cache for gru_backward"""
    batched = x_seq.ndim == 3
    if x_seq.ndim not in (2, 3) or x_seq.shape[-1] != params.input_size:
        raise DimensionError(f"GRU expects (seq_len, {params.input_size}) or (batch, seq_len, {params.input_size}), got {x_seq.shape}")
    X = x_seq if batched else x_seq[None]
    B, T, _ = X.shape
    H = params.hidden_size

    if h0 is None:
        h = np.zeros((B, H))
    else:
        h0 = np.asarray(h0, dtype=np.float64)
        if h0.shape not in ((H,), (B, H)):
            raise DimensionError(f"GRU h0 must have shape ({H},) or ({B}, {H}), got {h0.shape}")
        h = np.broadcast_to(h0, (B, H)).copy()

    hs = np.empty((B, T + 1, H))
    zs, rs, cands = (np.empty((B, T, H)) for _ in range(3))
    hs[:, 0] = h
    for t in range(T):
        x = X[:, t]
        z = sigmoid(x @ params.W_z.T + h @ params.U_z.T + params.b_z)
        r = sigmoid(x @ params.W_r.T + h @ params.U_r.T + params.b_r)
        cand = np.tanh(x @ params.W_h.T + (r * h) @ params.U_h.T + params.b_h)
        h = (1.0 - z) * h + z * cand
        zs[:, t], rs[:, t], cands[:, t], hs[:, t + 1] = z, r, cand, h

    cache = {'X': X, 'hs': hs, 'z': zs, 'r': rs, 'cand': cands, 'batched': batched}
    h_seq = hs[:, 1:]
    return (h_seq if batched else h_seq[0]), cache


def gru_backward(params: GruParams, cache: dict, dh_seq: np.ndarray) -> Tuple[Dict[str, np.ndarray], np.ndarray, np.ndarray]:
    """Backpropagation through time; returns (parameter grads, dx_seq, dh0)"""
    X, hs = cache['X'], cache['hs']
    B, T, _ = X.shape
    dH = dh_seq if cache['batched'] else dh_seq[None]
    if dH.shape != (B, T, params.hidden_size):
        raise DimensionError(f"GRU backward expects dh_seq of shape {(B, T, params.hidden_size)}, got {dH.shape}")

    grads = {name: np.zeros_like(getattr(params, name)) for name in GRU_NAMES}
    dX = np.zeros_like(X)
    dh_next = np.zeros((B, params.hidden_size))

    for t in reversed(range(T)):
        x, h_prev = X[:, t], hs[:, t]
        z, r, cand = cache['z'][:, t], cache['r'][:, t], cache['cand'][:, t]
        dh = dH[:, t] + dh_next

        d_cand_pre = dh * z * (1.0 - cand * cand)
        d_z_pre = dh * (cand - h_prev) * z * (1.0 - z)
        d_rh = d_cand_pre @ params.U_h
        d_r_pre = d_rh * h_prev * r * (1.0 - r)

        grads['W_h'] += d_cand_pre.T @ x
        grads['U_h'] += d_cand_pre.T @ (r * h_prev)
        grads['b_h'] += d_cand_pre.sum(axis=0)
        grads['W_z'] += d_z_pre.T @ x
        grads['U_z'] += d_z_pre.T @ h_prev
        grads['b_z'] += d_z_pre.sum(axis=0)
        grads['W_r'] += d_r_pre.T @ x
        grads['U_r'] += d_r_pre.T @ h_prev
        grads['b_r'] += d_r_pre.sum(axis=0)

        dX[:, t] = d_cand_pre @ params.W_h + d_z_pre @ params.W_z + d_r_pre @ params.W_r
        dh_next = dh * (1.0 - z) + d_rh * r + d_z_pre @ params.U_z + d_r_pre @ params.U_r

    if not cache['batched']:
        return grads, dX[0], dh_next[0]
    return grads, dX, dh_next
