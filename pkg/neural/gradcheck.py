"""
Finite-difference verification of the analytic gradients
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from neural.network import Gradients, QNetwork, backward_q, forward_q

logger = logging.getLogger(__name__)

RELATIVE_FLOOR = 1e-4


def relative_error(analytic, numeric, floor: float = RELATIVE_FLOOR):
    """|a - n| / max(|a|, |n|, floor), elementwise"""
    analytic, numeric = np.asarray(analytic), np.asarray(numeric)
    return np.abs(analytic - numeric) / np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)


def numerical_gradient(f: Callable[[], float], array: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central differences of the scalar f() with respect to every entry of array (perturbed in place)"""
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + eps
        plus = f()
        flat[i] = original - eps
        minus = f()
        flat[i] = original
        grad.reshape(-1)[i] = (plus - minus) / (2 * eps)
    return grad


@dataclass
class GradCheckReport:
    max_relative_error: float
    worst_parameter: str
    checked: int
    skipped_kinks: int
    eps: float

    def passed(self, threshold: float = 1e-5) -> bool:
        return self.max_relative_error < threshold


def _masks_equal(a: dict, b: dict) -> bool:
    return all(np.array_equal(x, y) for x, y in zip(a["masks"], b["masks"]))


def gradient_check(
    net: QNetwork,
    trials: int = 200,
    eps: float = 1e-5,
    rng: Optional[np.random.Generator] = None,
    grad_hook: Optional[Callable[[Gradients], None]] = None,
) -> GradCheckReport:
    """Compare backward_q with central differences on randomly drawn parameter coordinates

    The scalar checked is c . q(window) for a random window and cotangent c.
    Coordinates whose +-eps perturbation flips a rectifier are redrawn.
    grad_hook may corrupt the analytic gradients to prove the check catches faults.
    """
    rng = rng or np.random.default_rng(0)
    cfg = net.config
    window = rng.standard_normal((cfg.seq_len, cfg.obs_dim))
    c = rng.standard_normal(cfg.n_actions)

    _, base_cache = forward_q(net, window)
    grads = backward_q(net, base_cache, c)
    if grad_hook is not None:
        grad_hook(grads)

    names = list(net.params)
    sizes = np.array([net.params[n].size for n in names])
    bounds = np.cumsum(sizes)

    worst, worst_name, checked, skipped = 0.0, "", 0, 0
    while checked < trials and skipped < 10 * trials:
        flat_index = int(rng.integers(bounds[-1]))
        k = int(np.searchsorted(bounds, flat_index, side="right"))
        name = names[k]
        i = flat_index - (bounds[k - 1] if k else 0)
        values = net.params[name].reshape(-1)
        original = values[i]

        values[i] = original + eps
        q_plus, cache_plus = forward_q(net, window)
        values[i] = original - eps
        q_minus, cache_minus = forward_q(net, window)
        values[i] = original

        if not (_masks_equal(base_cache, cache_plus) and _masks_equal(base_cache, cache_minus)):
            skipped += 1
            continue

        numeric = (float(c @ q_plus) - float(c @ q_minus)) / (2 * eps)
        err = float(relative_error(grads[name].reshape(-1)[i], numeric))
        if err > worst:
            worst, worst_name = err, name
        checked += 1

    logger.info(f"Gradient check: {checked} coordinates, {skipped} kinks skipped, max relative error {worst:.3e} ({worst_name or '-'})")
    return GradCheckReport(max_relative_error=worst, worst_parameter=worst_name, checked=checked, skipped_kinks=skipped, eps=eps)
