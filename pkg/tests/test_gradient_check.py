import numpy as np
import pytest

from arch.builders import build_lenet, build_vgg16
from cnn.gradient_check import gradient_check
from cnn.network import build_network
from cnn.tensor_core import make_rng
from utils.errors import GradientCheckError, InvalidParameterError


def _batch(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, 3, 32, 32)), rng.integers(0, 10, size=n)


def test_lenet_gradients_pass():
    network = build_network(build_lenet(2), make_rng(3))
    inputs, labels = _batch(8)
    report = gradient_check(network, inputs, labels, tolerance=1e-4, samples=100)
    assert report.passed
    assert set(report.worst_by_layer()) == {"conv1", "conv2", "dense1", "dense2", "dense3"}
    assert all(check.checked > 0 for check in report.parameters)
    for (_, param, _), check in zip(network.named_parameters(), report.parameters, strict=True):
        assert check.checked + check.skipped == min(100, param.size)


def test_zero_input_dense_bias_still_matches():
    network = build_network(build_lenet(2), make_rng(5))
    inputs = np.zeros((4, 3, 32, 32))
    labels = np.array([0, 1, 2, 3])
    report = gradient_check(network, inputs, labels, tolerance=1e-4, samples=10, raise_on_failure=False)
    biases = [check for check in report.parameters if check.name.startswith("dense") and check.name.endswith("bias")]
    assert biases
    assert all(check.worst_error < 1e-4 for check in biases)
    assert next(c for c in biases if c.name == "dense3.bias").checked == 10


def test_check_restores_parameters():
    network = build_network(build_lenet(1), make_rng(0))
    before = [np.copy(p) for _, p, _ in network.named_parameters()]
    inputs, labels = _batch(4, seed=1)
    gradient_check(network, inputs, labels, samples=5)
    for original, (_, param, _) in zip(before, network.named_parameters(), strict=True):
        assert np.array_equal(original, param)


def test_corrupted_gradient_is_reported():
    network = build_network(build_lenet(1), make_rng(0))
    layer = network.layers[-1]
    backward = layer.backward

    def broken(grad_out):
        grad_input = backward(grad_out)
        layer.grad_bias = layer.grad_bias * 2.0 + 1.0
        return grad_input

    layer.backward = broken
    inputs, labels = _batch(4, seed=2)
    with pytest.raises(GradientCheckError) as excinfo:
        gradient_check(network, inputs, labels, samples=5)
    assert excinfo.value.layer == "dense3.bias"


@pytest.mark.slow
def test_minimal_vgg_gradients_pass():
    network = build_network(build_vgg16(1), make_rng(7))
    inputs, labels = _batch(4, seed=3)
    report = gradient_check(network, inputs, labels, tolerance=1e-3, samples=100)
    assert report.passed


def test_non_finite_inputs_are_rejected():
    network = build_network(build_lenet(1), make_rng(0))
    inputs = make_rng(1).uniform(-1.0, 1.0, size=(2, 3, 32, 32))
    inputs[1, 0, 5, 5] = np.nan
    with pytest.raises(InvalidParameterError):
        gradient_check(network, inputs, np.array([0, 1]))
    inputs[1, 0, 5, 5] = np.inf
    with pytest.raises(InvalidParameterError):
        network.predict(inputs)
