import numpy as np
import pytest

from storage.cifar10 import Dataset


def write_cifar_batch(path, labels, pixels=None, seed=0):
    """按 CIFAR-10 二进制格式写出记录，返回 (像素, 标签)."""
    labels = np.asarray(labels, dtype=np.uint8)
    if pixels is None:
        pixels = np.random.default_rng(seed).integers(0, 256, size=(labels.size, 3072), dtype=np.uint8)
    records = np.concatenate([labels[:, None], pixels.reshape(labels.size, 3072)], axis=1)
    path.write_bytes(records.astype(np.uint8).tobytes())
    return pixels.reshape(labels.size, 3, 32, 32), labels


def make_dataset(per_class, seed=0, split="train"):
    """每类 per_class 张随机图像的数据集，每类图像带有可区分的亮度偏置."""
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(10), per_class)
    noise = rng.integers(0, 96, size=(labels.size, 3, 32, 32))
    pixels = (noise + labels[:, None, None, None] * 16).astype(np.uint8)
    return Dataset(pixels, labels.astype(np.int64), split)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_data():
    return make_dataset(2, seed=1), make_dataset(2, seed=2, split="test")
