import math

import numpy as np
import pytest

import training.trainer as trainer
from arch.builders import build_lenet
from cnn.network import Network, build_network
from cnn.tensor_core import make_rng
from storage.checkpoint import load_checkpoint
from storage.cifar10 import load_cifar10
from training.batches import stratified_holdout
from training.config import TrainConfig, preset
from training.trainer import AGGREGATE_LABEL, aggregate_runs, evaluate, train, train_seed
from utils.errors import InvalidParameterError, TrainingDivergedError
from utils.settings import cifar10_root

from .conftest import make_dataset


class FixedOutputs:
    """按给定输出作答的模型."""

    def __init__(self, outputs):
        self.outputs = outputs

    def predict(self, inputs):
        assert inputs.shape[0] == self.outputs.shape[0]
        return self.outputs


def tiny_config(**overrides):
    values = {"eta": 0.01, "mu": 0.9, "alpha": 1e-4, "epochs": 2, "batch_size": 10, "deterministic": True}
    values.update(overrides)
    return TrainConfig(**values)


def test_perfect_model_has_zero_error():
    data = make_dataset(3)
    assert evaluate(FixedOutputs(np.eye(10)[data.labels]), data) == 0.0


def test_constant_model_on_balanced_set():
    data = make_dataset(3)
    assert evaluate(FixedOutputs(np.ones((30, 10))), data) == pytest.approx(0.9)


def test_error_invariant_under_monotone_transform():
    data = make_dataset(5)
    logits = np.random.default_rng(0).standard_normal((50, 10))
    assert evaluate(FixedOutputs(logits), data) == evaluate(FixedOutputs(np.exp(3 * logits) + 1), data)


def test_evaluate_in_chunks(tiny_data):
    network = build_network(build_lenet(1), make_rng(0))
    _, test = tiny_data
    assert evaluate(network, test, chunk=3) == evaluate(network, test)


def test_evaluate_rejects_empty_dataset():
    data = make_dataset(1)
    with pytest.raises(InvalidParameterError):
        evaluate(FixedOutputs(np.zeros((0, 10))), data.subset(np.array([], dtype=int), "test"))


def test_aggregate_runs():
    assert aggregate_runs([0.2]) == (0.2, None)
    mean, std = aggregate_runs([0.1, 0.3])
    assert mean == pytest.approx(0.2)
    assert std == pytest.approx(0.1414, abs=1e-4)
    assert aggregate_runs([0.25, 0.25, 0.25])[1] == 0.0
    with pytest.raises(InvalidParameterError):
        aggregate_runs([])


def test_train_reports_every_seed(tiny_data):
    train_data, test_data = tiny_data
    result = train(build_lenet(1), tiny_config(), train_data, test_data, seeds=[0, 1])
    assert sorted(result.errors) == [0, 1]
    assert result.std is not None
    assert list(result.traces.columns) == ["seed", "epoch", "train_loss", "test_error"]
    assert len(result.traces) == 4
    assert np.all(np.isfinite(result.traces["train_loss"]))
    assert set(result.checkpoints) == {0, 1}

    summary = result.summary()
    assert list(summary["seed"]) == ["0", "1", AGGREGATE_LABEL]
    assert summary.iloc[-1]["epsilon"] == pytest.approx(result.mean)


def test_deterministic_runs_are_identical(tiny_data):
    train_data, test_data = tiny_data
    first = train_seed(build_lenet(1), tiny_config(), train_data, test_data, seed=7)
    second = train_seed(build_lenet(1), tiny_config(), train_data, test_data, seed=7)
    assert first.traces == second.traces
    assert first.checkpoint == second.checkpoint


def test_non_deterministic_runs_differ(tiny_data):
    train_data, test_data = tiny_data
    config = tiny_config(deterministic=False, epochs=1)
    first = train_seed(build_lenet(1), config, train_data, test_data, seed=7)
    second = train_seed(build_lenet(1), config, train_data, test_data, seed=7)
    assert first.checkpoint != second.checkpoint


def test_checkpoint_restores_trained_network(tiny_data):
    train_data, test_data = tiny_data
    result = train_seed(build_lenet(1), tiny_config(), train_data, test_data, seed=3, checkpoint_precision=64)
    network, meta = load_checkpoint(result.checkpoint)
    assert (meta.seed, meta.epoch, meta.precision) == (3, 2, 64)
    assert evaluate(network, test_data) == result.epsilon


def test_without_checkpoint(tiny_data):
    train_data, test_data = tiny_data
    assert train_seed(build_lenet(1), tiny_config(epochs=1), train_data, test_data, 0, None).checkpoint is None


def test_divergence_names_the_step(tiny_data, monkeypatch):
    monkeypatch.setattr(Network, "loss_and_gradients", lambda self, *args, **kwargs: math.nan)
    train_data, test_data = tiny_data
    with pytest.raises(TrainingDivergedError) as excinfo:
        train_seed(build_lenet(1), tiny_config(), train_data, test_data, seed=4)
    assert (excinfo.value.seed, excinfo.value.epoch, excinfo.value.step) == (4, 1, 1)


def test_validation_holdout_adds_column(tiny_data, monkeypatch):
    monkeypatch.setattr(trainer, "stratified_holdout", lambda labels, seed: stratified_holdout(labels, seed, 1))
    train_data, test_data = tiny_data
    result = train_seed(build_lenet(1), tiny_config(validation_holdout=True), train_data, test_data, seed=0)
    assert all(0.0 <= row["validation_error"] <= 1.0 for row in result.traces)


def test_no_augmentation_still_trains(tiny_data):
    train_data, test_data = tiny_data
    result = train_seed(build_lenet(1), tiny_config(augment=False, epochs=1), train_data, test_data, seed=0)
    assert 0.0 <= result.epsilon <= 1.0


@pytest.mark.slow
@pytest.mark.skipif(cifar10_root() is None, reason="需要设置 CIFAR10_ROOT")
def test_lenet_smoke_run_on_cifar():
    train_data, test_data = load_cifar10()
    config = preset("lenet", 6).truncated(20)
    result = train(build_lenet(6), config, train_data, test_data, seeds=[0])
    assert result.traces["train_loss"].iloc[-1] < math.log(10)
    assert result.mean < 0.45


@pytest.mark.slow
@pytest.mark.skipif(cifar10_root() is None, reason="需要设置 CIFAR10_ROOT")
def test_error_falls_with_width_on_cifar():
    train_data, test_data = load_cifar10()
    means = []
    for d1 in (1, 3, 6):
        config = preset("lenet", d1).truncated(15)
        means.append(train(build_lenet(d1), config, train_data, test_data, seeds=[0, 1, 2]).mean)
    assert means[0] > means[1] > means[2]
