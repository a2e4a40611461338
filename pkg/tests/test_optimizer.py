import numpy as np
import pytest

from arch.builders import build_lenet
from cnn.network import build_network
from cnn.tensor_core import make_rng
from training.optimizer import NesterovSGD, sgd_nesterov_step
from utils.errors import InvalidShapeError


def test_plain_sgd_when_no_momentum(rng):
    w, g = rng.standard_normal(5), rng.standard_normal(5)
    new_w, new_v = sgd_nesterov_step(w, g, np.zeros(5), eta=0.1, mu=0.0, alpha=0.0)
    np.testing.assert_allclose(new_w, w - 0.1 * g)
    np.testing.assert_allclose(new_v, g)


def test_momentum_only_step(rng):
    w, v = rng.standard_normal(4), rng.standard_normal(4)
    new_w, new_v = sgd_nesterov_step(w, np.zeros(4), v, eta=0.2, mu=0.9, alpha=0.0)
    np.testing.assert_allclose(new_w, w - 0.2 * 0.9**2 * v)
    np.testing.assert_allclose(new_v, 0.9 * v)


def test_decay_only_step(rng):
    w = rng.standard_normal(6)
    eta, mu, alpha = 0.1, 0.9, 0.01
    new_w, _ = sgd_nesterov_step(w, np.zeros(6), np.zeros(6), eta, mu, alpha)
    np.testing.assert_allclose(new_w, w * (1 - eta * alpha * (1 + mu)))


def test_step_does_not_mutate_inputs(rng):
    w, g, v = rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal(3)
    copies = [w.copy(), g.copy(), v.copy()]
    sgd_nesterov_step(w, g, v, 0.1, 0.9, 0.01)
    for original, array in zip(copies, (w, g, v), strict=True):
        assert np.array_equal(original, array)


def test_shape_mismatch():
    with pytest.raises(InvalidShapeError):
        sgd_nesterov_step(np.zeros(3), np.zeros(4), np.zeros(3), 0.1, 0.9, 0.0)


def test_network_optimizer_matches_pure_step():
    network = build_network(build_lenet(1), make_rng(0))
    inputs = make_rng(1).standard_normal((10, 3, 32, 32))
    labels = np.arange(10)
    before = [(name, p.copy(), g) for name, p, g in network.named_parameters()]
    network.loss_and_gradients(inputs, labels)
    grads = [g.copy() for _, _, g in network.named_parameters()]

    optimizer = NesterovSGD(network, mu=0.9, alpha=0.01)
    optimizer.step(0.05)
    for (name, w0, _), g, (_, w1, _) in zip(before, grads, network.named_parameters(), strict=True):
        alpha = 0.01 if name.endswith(".weights") else 0.0
        expected, _ = sgd_nesterov_step(w0, g, np.zeros_like(w0), 0.05, 0.9, alpha)
        np.testing.assert_allclose(w1, expected, rtol=1e-12, atol=1e-15)
    assert optimizer.velocity_norm() > 0


def test_bias_decay_is_optional():
    network = build_network(build_lenet(1), make_rng(0))
    assert NesterovSGD(network, 0.9, 0.01).decay.count(0.01) == 5
    assert NesterovSGD(network, 0.9, 0.01, decay_biases=True).decay.count(0.01) == 10


def test_small_step_reduces_loss():
    network = build_network(build_lenet(1), make_rng(4))
    image = make_rng(5).standard_normal((1, 3, 32, 32))
    label = np.array([3])
    before = network.loss_and_gradients(image, label)
    NesterovSGD(network, mu=0.0, alpha=0.0).step(1e-4)
    assert network.loss_and_gradients(image, label) < before
