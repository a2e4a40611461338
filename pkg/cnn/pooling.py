#!/usr/bin/env python
"""2×2 最大池化模块.

窗口内并列最大值取行主序扫描的第一个位置，保证反向路由确定。
"""

import numpy as np

from cnn.layer import TRAIN, Layer, as_batch
from cnn.tensor_core import DTYPE, Tensor
from utils.errors import InvalidShapeError

WINDOW = 2


def _windows(x: Tensor) -> Tensor:
    """[N,C,H,W] → [N,C,H/2,W/2,4]，最后一维按行主序排列窗口元素."""
    n, c, h, w = x.shape
    if h % WINDOW or w % WINDOW:
        raise InvalidShapeError(f"最大池化要求空间尺寸为偶数，实际为 {h}×{w}")
    blocks = x.reshape(n, c, h // WINDOW, WINDOW, w // WINDOW, WINDOW)
    return blocks.transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h // WINDOW, w // WINDOW, WINDOW * WINDOW)


def maxpool_forward(inputs: Tensor) -> tuple[Tensor, Tensor]:
    """最大池化前向.

    Args:
        inputs: [C,H,W] 或 [N,C,H,W]，H、W 为偶数。

    Returns:
        tuple[Tensor, Tensor]: (输出, argmax 映射)，argmax 为窗口内 0..3 的索引。

    Raises:
        InvalidShapeError: 空间尺寸为奇数。
    """
    x, single = as_batch(inputs, 3)
    windows = _windows(x)
    argmax = np.argmax(windows, axis=-1)
    out = np.take_along_axis(windows, argmax[..., np.newaxis], axis=-1)[..., 0]
    if single:
        return out[0], argmax[0]
    return out, argmax


def maxpool_backward(grad_out: Tensor, argmax: Tensor) -> Tensor:
    """最大池化反向：梯度只路由到 argmax 位置，其余为零.

    Args:
        grad_out: 与池化输出同形状的梯度。
        argmax: 前向得到的 argmax 映射。

    Returns:
        Tensor: 与池化输入同形状的梯度。
    """
    if grad_out.shape != argmax.shape:
        raise InvalidShapeError(f"池化梯度形状 {grad_out.shape} 与 argmax 形状 {argmax.shape} 不一致")
    g, single = as_batch(grad_out, 3)
    idx, _ = as_batch(argmax, 3)
    n, c, out_h, out_w = g.shape
    routed = (np.arange(WINDOW * WINDOW) == idx[..., np.newaxis]) * g[..., np.newaxis]
    grad = routed.reshape(n, c, out_h, out_w, WINDOW, WINDOW).transpose(0, 1, 2, 4, 3, 5)
    grad = np.ascontiguousarray(grad.reshape(n, c, out_h * WINDOW, out_w * WINDOW), dtype=DTYPE)
    return grad[0] if single else grad


class PoolLayer(Layer):
    """2×2、步长2的最大池化层."""

    def __init__(self, label: str = "pool") -> None:
        """初始化池化层."""
        self.label = label
        self.argmax: Tensor | None = None

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """输出尺寸 = floor(输入尺寸 / 2)."""
        c, h, w = input_shape
        return (c, h // WINDOW, w // WINDOW)

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """前向并缓存 argmax."""
        out, self.argmax = maxpool_forward(inputs)
        return out

    def backward(self, grad_out: Tensor) -> Tensor:
        """按缓存的 argmax 路由梯度."""
        if self.argmax is None:
            raise InvalidShapeError(f"{self.label} 尚未执行前向计算")
        return maxpool_backward(grad_out, self.argmax)
