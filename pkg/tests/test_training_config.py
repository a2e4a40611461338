import json

import pytest

from arch.arch_spec import ArchFamily
from training.config import (
    Regime,
    TrainConfig,
    constant_schedule,
    list_presets,
    load_experiment,
    lr_at,
    preset,
    preset_entry,
    save_experiment,
)
from utils.errors import InvalidParameterError, NoPresetError, ScheduleError


@pytest.fixture
def lenet_main():
    return preset("lenet", 6)


def test_lenet_main_preset(lenet_main):
    assert (lenet_main.eta, lenet_main.mu, lenet_main.alpha, lenet_main.epochs) == (0.028, 0.910, 9.5e-4, 280)
    assert lenet_main.schedule == (Regime(1, 120, 0.8, 10), Regime(121, None, 0.7, 10))
    assert lenet_main.batch_size == 100


def test_vgg_and_ratio_presets():
    vgg = preset(ArchFamily.VGG16, 32)
    assert (vgg.eta, vgg.mu, vgg.alpha, vgg.epochs) == (0.01, 0.965, 9.5e-4, 200)
    assert vgg.schedule == (Regime(1, None, 0.6, 20),)

    entry = preset_entry("lenet", 18, "ratio_4_3")
    assert entry.constant == pytest.approx(4 / 3)
    assert entry.d2 == (24,)
    assert (entry.config.eta, entry.config.mu, entry.config.alpha) == (0.025, 0.975, 2e-4)
    assert [r.q for r in entry.config.schedule] == [0.95, 0.9, 0.8]


def test_bracketed_d2_presets():
    assert preset_entry("lenet", 1).d2 == (2, 3)
    assert preset_entry("lenet", 2).d2 == (5, 6)


def test_missing_preset():
    with pytest.raises(NoPresetError):
        preset("lenet", 44)
    with pytest.raises(NoPresetError):
        preset("vgg16", 8, "growth_9")


def test_list_presets_covers_all_tables():
    entries = list_presets()
    assert ("lenet", "main", 6) in entries
    assert ("vgg16-enhanced", "main", 16) in entries
    assert len(entries) == 25
    for family, variant, d in entries:
        assert preset(family, d, variant).epochs > 0


@pytest.mark.parametrize("epoch,expected", [
    (5, 0.028),
    (10, 0.028),
    (11, 0.028 * 0.8),
    (25, 0.028 * 0.8**2),
    (125, 0.028 * 0.8**12),
    (131, 0.028 * 0.8**12 * 0.7),
])
def test_lr_at_lenet_main(lenet_main, epoch, expected):
    assert lr_at(lenet_main, epoch) == pytest.approx(expected, rel=1e-12)


def test_lr_at_is_non_increasing_for_every_preset():
    for family, variant, d in list_presets():
        config = preset(family, d, variant)
        rates = [lr_at(config, epoch) for epoch in range(1, config.epochs + 1)]
        assert all(b <= a for a, b in zip(rates, rates[1:], strict=False))


def test_lr_at_range(lenet_main):
    with pytest.raises(ScheduleError):
        lr_at(lenet_main, 0)
    with pytest.raises(ScheduleError):
        lr_at(lenet_main, 281)


def test_invalid_config_values():
    with pytest.raises(InvalidParameterError):
        TrainConfig(eta=0.0, mu=0.9, alpha=0.0, epochs=1)
    with pytest.raises(InvalidParameterError):
        TrainConfig(eta=0.1, mu=1.0, alpha=0.0, epochs=1)
    with pytest.raises(InvalidParameterError):
        TrainConfig(eta=0.1, mu=0.9, alpha=0.0, epochs=1, batch_size=25)


def test_schedule_must_cover_epochs():
    with pytest.raises(ScheduleError):
        TrainConfig(eta=0.1, mu=0.9, alpha=0.0, epochs=10, schedule=(Regime(1, 5, 0.5, 1),))
    with pytest.raises(ScheduleError):
        TrainConfig(eta=0.1, mu=0.9, alpha=0.0, epochs=10, schedule=(Regime(1, 5, 0.5, 1), Regime(7, None, 0.5, 1)))
    with pytest.raises(ScheduleError):
        Regime(1, None, 1.5, 1)
    TrainConfig(eta=0.1, mu=0.9, alpha=0.0, epochs=10, schedule=(Regime(1, 5, 0.5, 1), Regime(6, 10, 0.5, 1)))


def test_truncated_keeps_learning_rates(lenet_main):
    short = lenet_main.truncated(20)
    assert short.epochs == 20
    assert short.schedule == (Regime(1, None, 0.8, 10),)
    for epoch in range(1, 21):
        assert lr_at(short, epoch) == lr_at(lenet_main, epoch)
    with pytest.raises(InvalidParameterError):
        lenet_main.truncated(300)


def test_constant_schedule():
    config = TrainConfig(eta=0.05, mu=0.0, alpha=0.0, epochs=3, schedule=constant_schedule())
    assert [lr_at(config, e) for e in (1, 2, 3)] == [0.05] * 3


def test_experiment_file_round_trip(tmp_path, lenet_main):
    path = tmp_path / "experiment.json"
    arch = {"family": "lenet", "d": 6}
    save_experiment(lenet_main, path, arch)
    config, loaded_arch = load_experiment(path)
    assert config == lenet_main
    assert loaded_arch == arch


def test_experiment_file_ignores_unknown_keys(tmp_path, caplog):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"eta": 0.1, "mu": 0.5, "alpha": 0.0, "epochs": 2, "dropout": 0.5}), encoding="utf-8")
    config, arch = load_experiment(path)
    assert arch is None
    assert config.epochs == 2
    assert "dropout" in caplog.text


def test_experiment_file_missing_fields(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"eta": 0.1}), encoding="utf-8")
    with pytest.raises(InvalidParameterError):
        load_experiment(path)
