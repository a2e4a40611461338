#!/usr/bin/env python
"""按类别均衡的 mini-batch 划分模块.

每个 batch 中10个类别各占 batch_size/10 个样本；一个 epoch 内每个样本恰好出现一次。
"""

import numpy as np

from cnn.tensor_core import make_rng
from utils.errors import StratificationError

NUM_CLASSES = 10
HOLDOUT_PER_CLASS = 1000


def _class_indices(labels: np.ndarray) -> list[np.ndarray]:
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= NUM_CLASSES):
        raise StratificationError(f"标签必须在 [0, {NUM_CLASSES}) 内")
    return [np.flatnonzero(labels == c) for c in range(NUM_CLASSES)]


def stratified_batches(labels: np.ndarray, seed: int, batch_size: int = 100) -> list[np.ndarray]:
    """生成一个 epoch 的 batch 索引列表.

    Args:
        labels: 每个样本的类别。
        seed: 本 epoch 的种子。
        batch_size: batch 大小，必须是10的倍数。

    Returns:
        list[np.ndarray]: 按训练顺序排列的索引数组。

    Raises:
        StratificationError: 各类样本数不同，或不能被 batch_size/10 整除。
    """
    if batch_size < NUM_CLASSES or batch_size % NUM_CLASSES:
        raise StratificationError(f"batch 大小必须是{NUM_CLASSES}的倍数: {batch_size}")
    per_class = batch_size // NUM_CLASSES
    groups = _class_indices(labels)
    counts = {len(g) for g in groups}
    if len(counts) != 1 or not groups[0].size or groups[0].size % per_class:
        raise StratificationError(
            f"各类样本数 {[len(g) for g in groups]} 必须相等且为 {per_class} 的正整数倍")
    n_batches = groups[0].size // per_class

    rng = make_rng(seed)
    # [n_batches, 10, per_class]
    table = np.stack([rng.permutation(g).reshape(n_batches, per_class) for g in groups], axis=1)
    table = rng.permuted(table.reshape(n_batches, batch_size), axis=1)
    return list(table[rng.permutation(n_batches)])


def stratified_holdout(labels: np.ndarray, seed: int,
                       per_class: int = HOLDOUT_PER_CLASS) -> tuple[np.ndarray, np.ndarray]:
    """按类别留出验证集.

    Returns:
        tuple: (剩余训练索引, 验证索引)，均已排序。

    Raises:
        StratificationError: 某类样本不足 per_class。
    """
    rng = make_rng(seed)
    held = []
    for c, group in enumerate(_class_indices(labels)):
        if group.size < per_class:
            raise StratificationError(f"类别 {c} 只有 {group.size} 个样本，不足 {per_class}")
        held.append(rng.choice(group, size=per_class, replace=False))
    holdout = np.sort(np.concatenate(held))
    keep = np.setdiff1d(np.arange(np.asarray(labels).size), holdout)
    return keep, holdout
