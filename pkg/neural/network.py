"""
Q-value networks

recurrent:   window -> rectified time-distributed dense -> GRU (h0 = 0) -> last hidden state
             -> rectified fc1 -> linear fc2 -> one Q-value per action
feedforward: flattened window -> rectified fc0 -> rectified fc1 -> linear fc2
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from core.errors import ConfigurationError, ContractViolationError, DimensionError
from neural.layers import GRU_NAMES, GruParams, dense_backward, dense_forward, gru_backward, gru_forward, relu

RECURRENT = "recurrent"
FEEDFORWARD = "feedforward"

Gradients = Dict[str, np.ndarray]


@dataclass(frozen=True)
class NetworkConfig:
    obs_dim: int = 26
    seq_len: int = 4
    tdl_units: int = 64
    gru_units: int = 64
    fc1_units: int = 64
    n_actions: int = 5
    init_scheme: str = "glorot_uniform"
    init_seed: int = 0
    family: str = RECURRENT
    ff_units: Optional[int] = None

    def __post_init__(self):
        problems = []
        if self.seq_len < 1:
            problems.append("seq_len must be >= 1")
        for name in ("obs_dim", "tdl_units", "gru_units", "fc1_units", "n_actions"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if self.ff_units is not None and self.ff_units < 1:
            problems.append("ff_units must be >= 1")
        if self.family not in (RECURRENT, FEEDFORWARD):
            problems.append(f"unknown network family '{self.family}'")
        if self.init_scheme != "glorot_uniform":
            problems.append(f"unknown init scheme '{self.init_scheme}'")
        if problems:
            raise ConfigurationError("; ".join(problems))


def recurrent_parameter_count(config: NetworkConfig) -> int:
    tdl = config.tdl_units * (config.obs_dim + 1)
    gru = 3 * config.gru_units * (config.tdl_units + config.gru_units + 1)
    fc1 = config.fc1_units * (config.gru_units + 1)
    fc2 = config.n_actions * (config.fc1_units + 1)
    return tdl + gru + fc1 + fc2


def matched_feedforward_units(config: NetworkConfig) -> int:
    """Hidden width h of the feed-forward net whose parameter count is closest to the recurrent one"""
    if config.ff_units is not None:
        return config.ff_units
    target = recurrent_parameter_count(config)
    inputs, actions = config.seq_len * config.obs_dim, config.n_actions
    # h^2 + (inputs + 2 + actions) h + actions = target
    linear = inputs + 2 + actions
    root = (-linear + math.sqrt(linear * linear + 4 * (target - actions))) / 2
    return max(1, int(round(root)))


def parameter_shapes(config: NetworkConfig) -> Dict[str, Tuple[int, ...]]:
    A = config.n_actions
    if config.family == FEEDFORWARD:
        h = matched_feedforward_units(config)
        return {
            "fc0.W": (h, config.seq_len * config.obs_dim), "fc0.b": (h,),
            "fc1.W": (h, h), "fc1.b": (h,),
            "fc2.W": (A, h), "fc2.b": (A,),
        }
    D, G, F = config.tdl_units, config.gru_units, config.fc1_units
    shapes = {"tdl.W": (D, config.obs_dim), "tdl.b": (D,)}
    for name in GRU_NAMES:
        shapes["gru." + name] = {"W": (G, D), "U": (G, G), "b": (G,)}[name[0]]
    shapes.update({"fc1.W": (F, G), "fc1.b": (F,), "fc2.W": (A, F), "fc2.b": (A,)})
    return shapes


def glorot_uniform(shapes: Dict[str, Tuple[int, ...]], seed: int) -> Dict[str, np.ndarray]:
    """Weights ~ U(-limit, limit) with limit = sqrt(6 / (fan_in + fan_out)); biases zero"""
    rng = np.random.Generator(np.random.PCG64(seed))
    params = {}
    for name, shape in shapes.items():
        if len(shape) == 1:
            params[name] = np.zeros(shape)
        else:
            limit = math.sqrt(6.0 / (shape[0] + shape[1]))
            params[name] = rng.uniform(-limit, limit, size=shape)
    return params


class QNetwork:
    def __init__(self, config: NetworkConfig, params: Optional[Dict[str, np.ndarray]] = None):
        self.config = config
        shapes = parameter_shapes(config)
        if params is None:
            params = glorot_uniform(shapes, config.init_seed)
        if list(params) != list(shapes):
            raise DimensionError(f"parameter names {list(params)} do not match {list(shapes)}")
        for name, shape in shapes.items():
            if params[name].shape != shape:
                raise DimensionError(f"parameter {name} has shape {params[name].shape}, expected {shape}")
        self.params = {name: np.array(value, dtype=np.float64) for name, value in params.items()}
        # bumped on every in-place update so stale forward caches are detectable
        self.version = 0

    @property
    def family(self) -> str:
        return self.config.family

    def parameter_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy(self) -> "QNetwork":
        return QNetwork(self.config, {name: p.copy() for name, p in self.params.items()})

    def load_parameters(self, params: Dict[str, np.ndarray]) -> None:
        for name, value in params.items():
            np.copyto(self.params[name], value)
        self.version += 1

    def apply_gradients(self, optimizer, grads: Gradients) -> None:
        optimizer.step(self.params, grads)
        self.version += 1

    def gru_params(self) -> GruParams:
        return GruParams.from_dict(self.params, "gru.")

    def q_values(self, window: np.ndarray) -> np.ndarray:
        return forward_q(self, window)[0]


def _check_window(net: QNetwork, window: np.ndarray) -> Tuple[np.ndarray, bool]:
    window = np.asarray(window, dtype=np.float64)
    expected = (net.config.seq_len, net.config.obs_dim)
    if window.shape[-2:] != expected or window.ndim not in (2, 3):
        raise DimensionError(f"window must have shape {expected} or (batch, *{expected}), got {window.shape}")
    batched = window.ndim == 3
    return (window if batched else window[None]), batched


def forward_q(net: QNetwork, window: np.ndarray) -> Tuple[np.ndarray, dict]:
    W, batched = _check_window(net, window)
    p = net.params
    cache = {"version": net.version, "owner": id(net), "batched": batched, "masks": []}

    if net.family == FEEDFORWARD:
        x = W.reshape(W.shape[0], -1)
        a0, cache["fc0"] = dense_forward(p["fc0.W"], p["fc0.b"], x)
        h0 = relu(a0)
        a1, cache["fc1"] = dense_forward(p["fc1.W"], p["fc1.b"], h0)
        cache["masks"] = [a0 > 0, a1 > 0]
    else:
        a_tdl, cache["tdl"] = dense_forward(p["tdl.W"], p["tdl.b"], W)
        u = relu(a_tdl)
        h_seq, cache["gru"] = gru_forward(net.gru_params(), u)
        cache["h_seq_shape"] = h_seq.shape
        a1, cache["fc1"] = dense_forward(p["fc1.W"], p["fc1.b"], h_seq[:, -1])
        cache["masks"] = [a_tdl > 0, a1 > 0]

    q, cache["fc2"] = dense_forward(p["fc2.W"], p["fc2.b"], relu(a1))
    return (q if batched else q[0]), cache


def backward_q(net: QNetwork, cache: dict, dq: np.ndarray, tdl_timesteps: Optional[Iterable[int]] = None) -> Gradients:
    """Gradients of sum(dq * q) with respect to every parameter

    tdl_timesteps restricts the time-distributed layer's gradient to the listed
    timesteps; by default all timesteps contribute.
    """
    if cache.get("owner") != id(net) or cache.get("version") != net.version:
        raise ContractViolationError("forward cache is stale: the network changed after forward_q")
    dq = np.asarray(dq, dtype=np.float64)
    dq = dq if cache["batched"] else dq[None]
    grads: Gradients = {}
    mask_in, mask_fc1 = cache["masks"]

    grads["fc2.W"], grads["fc2.b"], dv = dense_backward(cache["fc2"], dq)
    da1 = dv * mask_fc1
    grads["fc1.W"], grads["fc1.b"], d_hidden = dense_backward(cache["fc1"], da1)

    if net.family == FEEDFORWARD:
        da0 = d_hidden * mask_in
        grads["fc0.W"], grads["fc0.b"], _ = dense_backward(cache["fc0"], da0)
        return {name: grads[name] for name in net.params}

    dh_seq = np.zeros(cache["h_seq_shape"])
    dh_seq[:, -1] = d_hidden
    gru_grads, du, _ = gru_backward(net.gru_params(), cache["gru"], dh_seq)
    for name, g in gru_grads.items():
        grads["gru." + name] = g
    da_tdl = du * mask_in
    if tdl_timesteps is not None:
        keep = np.zeros(da_tdl.shape[1], dtype=bool)
        keep[list(tdl_timesteps)] = True
        da_tdl = da_tdl * keep[None, :, None]
    grads["tdl.W"], grads["tdl.b"], _ = dense_backward(cache["tdl"], da_tdl)
    return {name: grads[name] for name in net.params}
