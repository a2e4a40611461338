import json

import numpy as np
import pytest

from arch.serialization import load_spec
from main import EXIT_ARCH, EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from storage.cifar10 import TEST_FILES, TRAIN_FILES

from .conftest import write_cifar_batch

SUBCOMMANDS = ["arch", "madds", "fit", "extrapolate", "reproduce-tables", "train", "gradcheck"]


@pytest.mark.parametrize("argv", [["--help"], *([name, "--help"] for name in SUBCOMMANDS)])
def test_help_exits_zero(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 0


def test_bad_flags_exit_with_usage_code():
    with pytest.raises(SystemExit) as excinfo:
        main(["reproduce-tables", "nonexistent"])
    assert excinfo.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as excinfo:
        main(["arch", "lenet", "--d1", "six"])
    assert excinfo.value.code == EXIT_USAGE


def test_arch_lenet(tmp_path, capsys):
    output = tmp_path / "lenet.json"
    assert main(["arch", "lenet", "--d1", "6", "--ratio", "2.6667", "--output", str(output)]) == EXIT_OK
    assert load_spec(output).filters == (6, 16)
    out = capsys.readouterr().out
    assert "4.88%" in out
    assert "+2.44%" in out and "-2.44%" in out


def test_arch_vgg(tmp_path, capsys):
    assert main(["arch", "vgg16", "--d", "64", "--output", str(tmp_path / "vgg.json")]) == EXIT_OK
    assert "64, 128, 256, 512, 512" in capsys.readouterr().out
    assert main(["arch", "vgg16-enhanced", "--d", "16", "--output", str(tmp_path / "enh.json")]) == EXIT_OK
    assert "0.00%" in capsys.readouterr().out


def test_arch_errors(tmp_path):
    assert main(["arch", "lenet", "--d1", "0", "--output", str(tmp_path / "x.json")]) == EXIT_ARCH
    assert main(["arch", "lenet"]) == EXIT_USAGE
    assert not (tmp_path / "x.json").exists()


def test_madds(tmp_path, capsys):
    assert main(["madds", "lenet", "--d", "6"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "index,label,madds"
    assert out[-1] == "total,651720"

    spec = tmp_path / "vgg.json"
    main(["arch", "vgg16", "--d", "4", "--output", str(spec)])
    capsys.readouterr()
    assert main(["madds", "--spec", str(spec), "--mode", "forward_plus_backward"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == f"total,{3 * 18_276_352}"


def test_fit_reference_and_file(tmp_path, capsys):
    assert main(["fit", "--dataset", "vgg16_error"]) == EXIT_OK
    assert "rho=0.40" in capsys.readouterr().out

    data = tmp_path / "points.csv"
    data.write_text("d,epsilon\n1,0.5\n4,0.25\n16,0.125\n", encoding="utf-8")
    assert main(["fit", "--input", str(data)]) == EXIT_OK
    assert "rho=0.5 " in capsys.readouterr().out


def test_extrapolate(capsys):
    assert main(["extrapolate", "--at-d", "27", "--at-epsilon", "0.0481", "--family", "lenet"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "d,epsilon,madds"
    assert len(lines) == 3
    assert main(["extrapolate"]) == EXIT_USAGE


def test_reproduce_tables(tmp_path):
    assert main(["reproduce-tables", "ratio", "--output-dir", str(tmp_path)]) == EXIT_OK
    lines = (tmp_path / "ratio.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 6
    assert lines[0] == "epsilon,computed,published,relative_deviation"


def test_train_without_dataset(tmp_path, capsys):
    spec = tmp_path / "lenet.json"
    main(["arch", "lenet", "--d1", "6", "--output", str(spec)])
    code = main(["train", "--spec", str(spec), "--epochs", "1", "--data", str(tmp_path / "missing"),
                 "--output-dir", str(tmp_path / "runs")])
    assert code == EXIT_DATA
    assert "CIFAR10_ROOT" in capsys.readouterr().err


def test_train_flag_validation(tmp_path):
    assert main(["train", "--spec", str(tmp_path / "none.json")]) == EXIT_USAGE
    assert main(["train", "--seeds", "0"]) == EXIT_USAGE
    assert main(["train"]) == EXIT_USAGE


def test_gradcheck(capsys):
    assert main(["gradcheck", "lenet", "--d", "1", "--batch", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "conv1.weights" in out
    sampled = {}
    for line in out.splitlines():
        fields = line.split()
        if len(fields) == 7 and fields[1] == "检查":
            sampled[fields[0]] = int(fields[2]) + int(fields[4])
    assert sampled["dense1.weights"] == 100
    assert sampled["conv1.weights"] == 75


def test_reproduce_table_groups(tmp_path):
    first = tmp_path / "a"
    assert main(["reproduce-tables", "fig3a", "--output-dir", str(first)]) == EXIT_OK
    assert sorted(p.name for p in first.glob("*.csv")) == ["madds.csv"]

    second = tmp_path / "b"
    assert main(["reproduce-tables", "fig3b", "--output-dir", str(second)]) == EXIT_OK
    assert sorted(p.name for p in second.glob("*.csv")) == ["complexity.csv", "complexity_curve.csv", "exponents.csv"]
    header = (second / "exponents.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "family,theoretical,computed,published,relative_deviation"

    third = tmp_path / "c"
    assert main(["reproduce-tables", "fig3c", "--output-dir", str(third)]) == EXIT_OK
    assert sorted(p.name for p in third.glob("*.csv")) == ["ratio.csv"]


@pytest.fixture
def small_archive(tmp_path):
    """每类 10 张训练图像、1 张测试图像的 CIFAR-10 目录."""
    root = tmp_path / "cifar"
    root.mkdir()
    for i, name in enumerate(TRAIN_FILES):
        write_cifar_batch(root / name, np.arange(20) % 10, seed=i)
    write_cifar_batch(root / TEST_FILES[0], np.arange(10), seed=99)
    return root


def _experiment(tmp_path, epochs):
    path = tmp_path / f"experiment-{epochs}.json"
    path.write_text(json.dumps({
        "eta": 0.01, "mu": 0.9, "alpha": 1e-4, "epochs": epochs, "batch_size": 100, "seed": 0,
        "arch": {"family": "lenet", "d": 1},
    }), encoding="utf-8")
    return path


def _train_argv(config, data, output_dir, *extra):
    return ["train", "--config", str(config), "--data", str(data), "--output-dir", str(output_dir),
            "--allow-partial", *extra]


def test_train_small_archive(tmp_path, small_archive):
    out = tmp_path / "runs"
    assert main(_train_argv(_experiment(tmp_path, 20), small_archive, out, "--no-augment")) == EXIT_OK
    lines = (out / "results.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "seed,epoch,train_loss,test_error"
    assert len(lines) == 1 + 20
    assert [int(line.split(",")[1]) for line in lines[1:]] == list(range(1, 21))
    assert [p.name for p in (out / "checkpoints").glob("*.ckpt")] == ["lenet-d1-c2.66667-seed0.ckpt"]


def test_train_several_seeds(tmp_path, small_archive):
    out = tmp_path / "runs"
    assert main(_train_argv(_experiment(tmp_path, 2), small_archive, out, "--seeds", "3")) == EXIT_OK
    rows = [line.split(",") for line in (out / "summary.csv").read_text(encoding="utf-8").splitlines()]
    assert rows[0] == ["seed", "epsilon", "std"]
    assert [row[0] for row in rows[1:]] == ["0", "1", "2", "aggregate"]
    assert rows[-1][2] != ""
    assert len(list((out / "checkpoints").glob("*.ckpt"))) == 3


def test_train_deterministic_output(tmp_path, small_archive):
    config = _experiment(tmp_path, 3)
    for name in ("first", "second"):
        assert main(_train_argv(config, small_archive, tmp_path / name, "--deterministic")) == EXIT_OK
    for file in ("results.csv", "summary.csv"):
        assert (tmp_path / "first" / file).read_bytes() == (tmp_path / "second" / file).read_bytes()


def test_train_small_archive_requires_allow_partial(tmp_path, small_archive, capsys):
    argv = _train_argv(_experiment(tmp_path, 1), small_archive, tmp_path / "runs")[:-1]
    assert main(argv) == EXIT_DATA
    assert "CIFAR10_ROOT" in capsys.readouterr().err
