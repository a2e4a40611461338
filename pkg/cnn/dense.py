#!/usr/bin/env python
"""全连接层与展平层模块."""

import numpy as np

from cnn.layer import TRAIN, Layer, as_batch
from cnn.tensor_core import DTYPE, Tensor
from utils.errors import InvalidShapeError


class DenseLayer(Layer):
    """全连接层：out = W·in + b，W 形状 [out, in]."""

    def __init__(self, in_units: int, out_units: int, weights: Tensor | None = None,
                 bias: Tensor | None = None, label: str = "dense") -> None:
        """初始化全连接层.

        Args:
            in_units: 输入维数。
            out_units: 输出维数。
            weights: [out, in] 权重，缺省为零。
            bias: [out] 偏置，缺省为零。
            label: 层标签。
        """
        if in_units < 1 or out_units < 1:
            raise InvalidShapeError(f"全连接层维数非法: {in_units}→{out_units}")
        self.in_units = in_units
        self.out_units = out_units
        self.label = label
        self.weights = np.zeros((out_units, in_units), dtype=DTYPE) if weights is None else np.asarray(weights, dtype=DTYPE)
        self.bias = np.zeros(out_units, dtype=DTYPE) if bias is None else np.asarray(bias, dtype=DTYPE)
        if self.weights.shape != (out_units, in_units) or self.bias.shape != (out_units,):
            raise InvalidShapeError(f"{label} 权重形状应为 {(out_units, in_units)}")
        self.grad_weights = np.zeros_like(self.weights)
        self.grad_bias = np.zeros_like(self.bias)
        self._cached_input: Tensor | None = None

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """单样本输出形状."""
        return (self.out_units,)

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """前向并缓存输入."""
        self._cached_input = inputs
        return dense_forward(inputs, self)

    def backward(self, grad_out: Tensor) -> Tensor:
        """反向，保存参数梯度."""
        if self._cached_input is None:
            raise InvalidShapeError(f"{self.label} 尚未执行前向计算")
        grad_input, self.grad_weights, self.grad_bias = dense_backward(grad_out, self._cached_input, self)
        return grad_input

    def parameters(self) -> dict[str, Tensor]:
        """权重与偏置."""
        return {"weights": self.weights, "bias": self.bias}

    def gradients(self) -> dict[str, Tensor]:
        """权重与偏置梯度."""
        return {"weights": self.grad_weights, "bias": self.grad_bias}


def dense_forward(inputs: Tensor, layer: DenseLayer) -> Tensor:
    """全连接前向.

    Args:
        inputs: [in] 或 [N, in]。
        layer: 全连接层。

    Raises:
        InvalidShapeError: 输入维数不符。
    """
    x, single = as_batch(inputs, 1)
    if x.shape[1] != layer.in_units:
        raise InvalidShapeError(f"{layer.label} 期望输入维数 {layer.in_units}，实际为 {x.shape[1]}")
    out = x @ layer.weights.T + layer.bias
    return out[0] if single else out


def dense_backward(grad_out: Tensor, cached_input: Tensor, layer: DenseLayer) -> tuple[Tensor, Tensor, Tensor]:
    """全连接反向，返回 (grad_input, grad_weights, grad_bias)."""
    x, single = as_batch(cached_input, 1)
    g, _ = as_batch(grad_out, 1)
    if g.shape != (x.shape[0], layer.out_units):
        raise InvalidShapeError(f"{layer.label} 梯度形状应为 {(x.shape[0], layer.out_units)}，实际为 {g.shape}")
    grad_input = g @ layer.weights
    return (grad_input[0] if single else grad_input), g.T @ x, g.sum(axis=0)


class FlattenLayer(Layer):
    """把 [N, C, H, W] 展平为 [N, C·H·W]."""

    def __init__(self, label: str = "flatten") -> None:
        """初始化展平层."""
        self.label = label
        self._input_shape: tuple[int, ...] | None = None

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """展平后的长度."""
        return (int(np.prod(input_shape)),)

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """展平."""
        self._input_shape = inputs.shape
        return inputs.reshape(inputs.shape[0], -1)

    def backward(self, grad_out: Tensor) -> Tensor:
        """恢复原形状."""
        if self._input_shape is None:
            raise InvalidShapeError(f"{self.label} 尚未执行前向计算")
        return grad_out.reshape(self._input_shape)
