#!/usr/bin/env python
"""ReLU 激活模块.

次梯度在 0 处取 0。
"""

import numpy as np

from cnn.layer import TRAIN, Layer
from cnn.tensor_core import Tensor
from utils.errors import InvalidShapeError


def relu_forward(inputs: Tensor) -> Tensor:
    """out = max(0, in)."""
    return np.maximum(inputs, 0.0)


def relu_backward(grad_out: Tensor, cached_input: Tensor) -> Tensor:
    """梯度只在 in > 0 处通过."""
    if grad_out.shape != cached_input.shape:
        raise InvalidShapeError(f"ReLU 梯度形状 {grad_out.shape} 与输入形状 {cached_input.shape} 不一致")
    return grad_out * (cached_input > 0.0)


class ReLULayer(Layer):
    """ReLU 层."""

    def __init__(self, label: str = "relu") -> None:
        """初始化ReLU层."""
        self.label = label
        self._cached_input: Tensor | None = None

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """前向并缓存输入."""
        self._cached_input = inputs
        return relu_forward(inputs)

    def backward(self, grad_out: Tensor) -> Tensor:
        """反向."""
        if self._cached_input is None:
            raise InvalidShapeError(f"{self.label} 尚未执行前向计算")
        return relu_backward(grad_out, self._cached_input)

    def mask(self) -> Tensor | None:
        """最近一次前向的激活模式（in > 0）."""
        return None if self._cached_input is None else self._cached_input > 0.0
