"""
Gradient-based optimizers over named parameter dictionaries
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from core.errors import ConfigurationError, TrainingDivergenceError


@dataclass
class AdamState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def _check_finite(grads: Dict[str, np.ndarray]) -> None:
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise TrainingDivergenceError(f"non-finite gradient for parameter '{name}'")


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """Bias-corrected Adam update, in place on params and state"""
    _check_finite(grads)
    state.t += 1
    bc1 = 1.0 - beta1 ** state.t
    bc2 = 1.0 - beta2 ** state.t

    for name, p in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m, v = state.m[name], state.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


class Adam:
    kind = "adam"

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        adam_step(params, grads, self.state, self.lr, self.beta1, self.beta2, self.eps)

    def state_dict(self) -> dict:
        return {
            "kind": self.kind,
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "t": self.state.t,
            "m": {name: a.tolist() for name, a in self.state.m.items()},
            "v": {name: a.tolist() for name, a in self.state.v.items()},
        }

    def load_state_dict(self, data: dict) -> None:
        self.lr, self.beta1, self.beta2, self.eps = data["lr"], data["beta1"], data["beta2"], data["eps"]
        self.state = AdamState(
            m={name: np.array(a, dtype=np.float64) for name, a in data["m"].items()},
            v={name: np.array(a, dtype=np.float64) for name, a in data["v"].items()},
            t=int(data["t"]),
        )


class SGD:
    """theta <- theta - lr * grad"""

    kind = "sgd"

    def __init__(self, lr: float = 1e-3):
        self.lr = lr

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        _check_finite(grads)
        for name, p in params.items():
            p -= self.lr * grads[name]

    def state_dict(self) -> dict:
        return {"kind": self.kind, "lr": self.lr}

    def load_state_dict(self, data: dict) -> None:
        self.lr = data["lr"]


def make_optimizer(kind: str, lr: float):
    if kind == "adam":
        return Adam(lr=lr)
    if kind == "sgd":
        return SGD(lr=lr)
    raise ConfigurationError(f"unknown optimizer '{kind}' (expected adam or sgd)")


def optimizer_from_state(data: dict):
    optimizer = make_optimizer(data["kind"], data["lr"])
    optimizer.load_state_dict(data)
    return optimizer
