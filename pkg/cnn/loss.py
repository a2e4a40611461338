#!/usr/bin/env python
"""softmax 与交叉熵损失模块.

计算前先减去最大值以保证数值稳定。
"""

import numpy as np

from cnn.tensor_core import Tensor
from utils.errors import InvalidLabelError, InvalidShapeError

NUM_CLASSES = 10


def softmax(logits: Tensor) -> Tensor:
    """沿最后一维计算 softmax."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def _log_softmax(logits: Tensor) -> Tensor:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def _check_labels(labels: np.ndarray, num_classes: int) -> None:
    if np.any(labels < 0) or np.any(labels >= num_classes):
        raise InvalidLabelError(f"标签必须在 [0, {num_classes}) 内")


def softmax_cross_entropy(logits: Tensor, label: int) -> tuple[float, Tensor]:
    """单个样本的 softmax 交叉熵.

    Args:
        logits: 长度为类别数的输出。
        label: 真实类别。

    Returns:
        tuple[float, Tensor]: (loss, grad_logits)，grad = softmax − one_hot。

    Raises:
        InvalidLabelError: 标签越界。
    """
    if logits.ndim != 1:
        raise InvalidShapeError(f"期望一维 logits，实际为 {logits.shape}")
    _check_labels(np.asarray([label]), logits.shape[0])
    log_probs = _log_softmax(logits)
    grad = np.exp(log_probs)
    grad[label] -= 1.0
    return float(-log_probs[label]), grad


def batch_cross_entropy(logits: Tensor, labels: np.ndarray) -> tuple[float, Tensor]:
    """批量平均交叉熵.

    Args:
        logits: [N, K]。
        labels: [N] 整数标签。

    Returns:
        tuple[float, Tensor]: (平均损失, 对 logits 的梯度，已除以 N)。
    """
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise InvalidShapeError(f"logits {logits.shape} 与标签 {labels.shape} 不匹配")
    _check_labels(labels, logits.shape[1])
    n = logits.shape[0]
    log_probs = _log_softmax(logits)
    rows = np.arange(n)
    loss = -float(np.mean(log_probs[rows, labels]))
    grad = np.exp(log_probs)
    grad[rows, labels] -= 1.0
    return loss, grad / n
