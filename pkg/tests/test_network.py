import numpy as np
import pytest

from core.errors import ContractViolationError, DimensionError
from neural.gradcheck import gradient_check
from neural.network import (
    FEEDFORWARD,
    NetworkConfig,
    QNetwork,
    backward_q,
    forward_q,
    matched_feedforward_units,
    recurrent_parameter_count,
)


@pytest.fixture
def net():
    return QNetwork(NetworkConfig())


def zero_network(config=None):
    net = QNetwork(config or NetworkConfig())
    for p in net.params.values():
        p[...] = 0.0
    return net


class TestForward:
    def test_zero_network(self, rng):
        q = zero_network().q_values(rng.standard_normal((4, 26)))
        np.testing.assert_array_equal(q, np.zeros(5))

    def test_bias_only_path(self, rng):
        net = zero_network()
        net.params["fc2.b"][:] = [1.0, 2.0, 3.0, 4.0, 5.0]
        np.testing.assert_array_equal(net.q_values(rng.standard_normal((4, 26))), [1.0, 2.0, 3.0, 4.0, 5.0])

    def test_same_seed_same_network(self, rng):
        a, b = QNetwork(NetworkConfig(init_seed=3)), QNetwork(NetworkConfig(init_seed=3))
        for name in a.params:
            np.testing.assert_array_equal(a.params[name], b.params[name])
        window = rng.standard_normal((4, 26))
        assert a.q_values(window).tobytes() == b.q_values(window).tobytes()
        c = QNetwork(NetworkConfig(init_seed=4))
        assert not np.array_equal(a.params["tdl.W"], c.params["tdl.W"])

    def test_glorot_limits_and_zero_biases(self, net):
        limit = np.sqrt(6.0 / (64 + 26))
        assert np.max(np.abs(net.params["tdl.W"])) <= limit
        for name, p in net.params.items():
            if p.ndim == 1:
                assert not p.any(), name

    def test_batch_matches_single(self, net, rng):
        windows = rng.standard_normal((7, 4, 26))
        q_batch, _ = forward_q(net, windows)
        for i in range(7):
            np.testing.assert_allclose(q_batch[i], net.q_values(windows[i]), rtol=0, atol=1e-13)

    def test_window_shape_is_checked(self, net):
        with pytest.raises(DimensionError):
            net.q_values(np.zeros((3, 26)))
        with pytest.raises(DimensionError):
            net.q_values(np.zeros((4, 25)))


class TestBackward:
    def test_zero_cotangent(self, net, rng):
        _, cache = forward_q(net, rng.standard_normal((4, 26)))
        grads = backward_q(net, cache, np.zeros(5))
        assert set(grads) == set(net.params)
        assert all(not g.any() for g in grads.values())

    def test_stale_cache(self, net, rng):
        _, cache = forward_q(net, rng.standard_normal((4, 26)))
        net.load_parameters(net.copy().params)
        with pytest.raises(ContractViolationError):
            backward_q(net, cache, np.ones(5))

    def test_cache_from_other_network(self, net, rng):
        _, cache = forward_q(net.copy(), rng.standard_normal((4, 26)))
        with pytest.raises(ContractViolationError):
            backward_q(net, cache, np.ones(5))

    def test_shared_tdl_gradient_is_sum_over_timesteps(self, net, rng):
        _, cache = forward_q(net, rng.standard_normal((4, 26)))
        c = rng.standard_normal(5)
        full = backward_q(net, cache, c)
        parts = [backward_q(net, cache, c, tdl_timesteps=[t]) for t in range(4)]
        for name in ("tdl.W", "tdl.b"):
            np.testing.assert_allclose(sum(p[name] for p in parts), full[name], rtol=1e-12, atol=1e-15)


class TestGradientCheck:
    def test_default_network(self, net):
        report = gradient_check(net, trials=200, eps=1e-5, rng=np.random.default_rng(0))
        assert report.checked == 200
        assert report.max_relative_error < 1e-6
        assert report.passed()

    @pytest.mark.parametrize("eps", [1e-4, 1e-5, 1e-6])
    def test_step_size_sweep(self, net, eps):
        report = gradient_check(net, trials=200, eps=eps, rng=np.random.default_rng(1))
        assert report.max_relative_error < 1e-5

    def test_detects_corrupted_candidate_gradient(self, net):
        def corrupt(grads):
            grads["gru.U_h"] += 1.0

        report = gradient_check(net, trials=400, rng=np.random.default_rng(2), grad_hook=corrupt)
        assert report.max_relative_error > 1e-2
        assert report.worst_parameter == "gru.U_h"
        assert not report.passed()

    def test_feedforward_network(self):
        net = QNetwork(NetworkConfig(family=FEEDFORWARD))
        report = gradient_check(net, trials=200, rng=np.random.default_rng(3))
        assert report.max_relative_error < 1e-6


class TestFeedforwardSizing:
    def test_matched_width(self):
        config = NetworkConfig()
        h = matched_feedforward_units(config)
        ff = QNetwork(NetworkConfig(family=FEEDFORWARD))
        assert ff.params["fc0.W"].shape == (h, 4 * 26)
        target = recurrent_parameter_count(config)
        assert abs(ff.parameter_count() - target) <= 2 * h + 4 * 26 + 7
        assert recurrent_parameter_count(config) == QNetwork(config).parameter_count()

    def test_explicit_width(self):
        net = QNetwork(NetworkConfig(family=FEEDFORWARD, ff_units=16))
        assert net.params["fc1.W"].shape == (16, 16)
