#!/usr/bin/env python
"""CIFAR-10 二进制数据加载模块.

标准二进制批文件由 3073 字节的记录组成：1 字节标签 + 3072 字节像素
（按 R、G、B 通道平面排列，每个平面 32×32 行主序）。
训练集为 data_batch_1.bin … data_batch_5.bin，测试集为 test_batch.bin。

像素预处理为 x → 2·(x/255) − 1，取值范围 [−1, 1]；不做逐通道去均值。
数据集在内存中保存原始字节，取用时再转换为 float64，转换是精确的仿射映射。
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cnn.tensor_core import DTYPE, Tensor
from utils.errors import CorruptRecordError, DatasetNotFoundError, InvalidLabelError, InvalidShapeError
from utils.logger import get_logger
from utils.settings import cifar10_root

logger = get_logger(__name__, "dataset.log")

RECORD_BYTES = 3073
IMAGE_SHAPE = (3, 32, 32)
NUM_CLASSES = 10
TRAIN_FILES = tuple(f"data_batch_{i}.bin" for i in range(1, 6))
TEST_FILES = ("test_batch.bin",)
CIFAR_COUNTS = (50_000, 10_000)
ARCHIVE_DIR = "cifar-10-batches-bin"


def preprocess(pixels: np.ndarray) -> Tensor:
    """像素字节归一化到 [−1, 1].

    Args:
        pixels: 0–255 的像素值。

    Returns:
        Tensor: 2·(x/255) − 1。
    """
    return 2.0 * (np.asarray(pixels, dtype=DTYPE) / 255.0) - 1.0


@dataclass(frozen=True)
class Dataset:
    """图像分类数据集.

    Attributes:
        pixels: [N, 3, 32, 32] 的 uint8 原始像素。
        labels: [N] 类别，取值 [0, 10)。
        split: "train"、"validation" 或 "test"。
    """

    pixels: np.ndarray
    labels: np.ndarray
    split: str

    def __post_init__(self) -> None:
        """检查形状与标签."""
        if self.pixels.ndim != 4 or self.pixels.shape[1:] != IMAGE_SHAPE:
            raise InvalidShapeError(f"图像形状应为 [N, 3, 32, 32]，实际为 {self.pixels.shape}")
        if self.labels.shape != (self.pixels.shape[0],):
            raise InvalidShapeError(f"标签数 {self.labels.shape} 与图像数 {self.pixels.shape[0]} 不一致")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= NUM_CLASSES):
            raise InvalidLabelError(f"标签必须在 [0, {NUM_CLASSES}) 内")

    def __len__(self) -> int:
        """样本数."""
        return int(self.labels.shape[0])

    @property
    def images(self) -> Tensor:
        """全部归一化图像 [N, 3, 32, 32]."""
        return preprocess(self.pixels)

    def batch(self, indices: np.ndarray) -> tuple[Tensor, np.ndarray]:
        """按索引取出归一化图像与标签."""
        return preprocess(self.pixels[indices]), self.labels[indices]

    def subset(self, indices: np.ndarray, split: str) -> "Dataset":
        """按索引取子集."""
        return Dataset(self.pixels[indices], self.labels[indices], split)


def _read_records(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """读取单个批文件，返回 (像素, 标签)."""
    if not path.exists():
        raise DatasetNotFoundError(f"缺少数据文件: {path}")
    raw = np.frombuffer(path.read_bytes(), dtype=np.uint8)
    complete = raw.size // RECORD_BYTES
    if raw.size % RECORD_BYTES:
        raise CorruptRecordError(f"{path.name} 最后一条记录被截断", offset=complete * RECORD_BYTES)
    records = raw.reshape(complete, RECORD_BYTES)
    labels = records[:, 0].astype(np.int64)
    bad = np.flatnonzero(labels >= NUM_CLASSES)
    if bad.size:
        raise CorruptRecordError(f"{path.name} 第 {bad[0]} 条记录标签为 {labels[bad[0]]}", offset=int(bad[0]) * RECORD_BYTES)
    pixels = records[:, 1:].reshape(complete, *IMAGE_SHAPE)
    logger.debug("读取 %s: %s 条记录", path.name, complete)
    return pixels, labels


def _load_split(root: Path, files: tuple[str, ...], split: str) -> Dataset:
    parts = [_read_records(root / name) for name in files]
    pixels = np.concatenate([p for p, _ in parts], axis=0)
    labels = np.concatenate([lab for _, lab in parts], axis=0)
    return Dataset(pixels, labels, split)


def resolve_root(path: Path | str | None = None) -> Path:
    """确定数据集目录：参数优先，其次 CIFAR10_ROOT；自动进入 cifar-10-batches-bin 子目录.

    Raises:
        DatasetNotFoundError: 未指定目录或目录不存在。
    """
    root = Path(path) if path is not None else cifar10_root()
    if root is None:
        raise DatasetNotFoundError("未指定数据集目录，请设置 CIFAR10_ROOT 或传入路径")
    if (root / ARCHIVE_DIR).is_dir():
        root = root / ARCHIVE_DIR
    if not root.is_dir():
        raise DatasetNotFoundError(f"数据集目录不存在: {root}")
    return root


def load_cifar10(path: Path | str | None = None,
                 expected_counts: tuple[int, int] | None = CIFAR_COUNTS) -> tuple[Dataset, Dataset]:
    """加载 CIFAR-10 训练集与测试集.

    Args:
        path: 数据集目录，缺省读取 CIFAR10_ROOT。
        expected_counts: 期望的 (训练, 测试) 样本数，None 表示不检查。

    Returns:
        tuple[Dataset, Dataset]: (train, test)。

    Raises:
        DatasetNotFoundError: 目录或文件缺失。
        CorruptRecordError: 记录截断或标签越界，附字节偏移。
    """
    root = resolve_root(path)
    train = _load_split(root, TRAIN_FILES, "train")
    test = _load_split(root, TEST_FILES, "test")
    if expected_counts is not None and (len(train), len(test)) != tuple(expected_counts):
        raise CorruptRecordError(f"样本数 {len(train)}/{len(test)} 与期望 {expected_counts} 不符", offset=0)
    logger.info("已加载 CIFAR-10: 训练 %s 条，测试 %s 条 (%s)", len(train), len(test), root)
    return train, test
