#!/usr/bin/env python
"""二维卷积层模块.

卷积通过 im2col 展开为矩阵乘法计算（滑动窗口视图 + BLAS），步长固定为1。
conv2d_reference 保留了直接的多重循环形式，作为快速实现的对照。
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from cnn.layer import TRAIN, Layer, as_batch
from cnn.tensor_core import DTYPE, Tensor
from utils.errors import InvalidShapeError


class ConvLayer(Layer):
    """卷积层：k×k 方形卷积核，步长1，零填充 padding."""

    def __init__(self, in_channels: int, out_channels: int, kernel: int, padding: int = 0,
                 weights: Tensor | None = None, bias: Tensor | None = None, label: str = "conv") -> None:
        """初始化卷积层.

        Args:
            in_channels: 输入通道数。
            out_channels: 卷积核个数。
            kernel: 卷积核边长。
            padding: 四周零填充宽度。
            weights: 形状 [out, in, k, k] 的权重，缺省为零。
            bias: 形状 [out] 的偏置，缺省为零。
            label: 层标签。
        """
        if min(in_channels, out_channels, kernel) < 1 or padding < 0:
            raise InvalidShapeError(f"卷积层参数非法: in={in_channels} out={out_channels} k={kernel} pad={padding}")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.padding = padding
        self.label = label
        shape = (out_channels, in_channels, kernel, kernel)
        self.weights = np.zeros(shape, dtype=DTYPE) if weights is None else np.asarray(weights, dtype=DTYPE)
        self.bias = np.zeros(out_channels, dtype=DTYPE) if bias is None else np.asarray(bias, dtype=DTYPE)
        if self.weights.shape != shape or self.bias.shape != (out_channels,):
            raise InvalidShapeError(f"{label} 权重形状应为 {shape}，偏置形状应为 ({out_channels},)")
        self.grad_weights = np.zeros_like(self.weights)
        self.grad_bias = np.zeros_like(self.bias)
        self._cached_input: Tensor | None = None

    def output_extent(self, extent: int) -> int:
        """输出空间边长 = 输入边长 + 2·padding − kernel + 1."""
        return extent + 2 * self.padding - self.kernel + 1

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """单样本输出形状."""
        _, h, w = input_shape
        return (self.out_channels, self.output_extent(h), self.output_extent(w))

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """前向计算并缓存输入."""
        self._cached_input = inputs
        return conv2d_forward(inputs, self)

    def backward(self, grad_out: Tensor) -> Tensor:
        """反向计算，保存权重与偏置梯度."""
        if self._cached_input is None:
            raise InvalidShapeError(f"{self.label} 尚未执行前向计算")
        grad_input, self.grad_weights, self.grad_bias = conv2d_backward(grad_out, self._cached_input, self)
        return grad_input

    def parameters(self) -> dict[str, Tensor]:
        """权重与偏置."""
        return {"weights": self.weights, "bias": self.bias}

    def gradients(self) -> dict[str, Tensor]:
        """权重与偏置梯度."""
        return {"weights": self.grad_weights, "bias": self.grad_bias}


def _check_input(x: Tensor, layer: ConvLayer) -> tuple[int, int]:
    """检查通道数和输出尺寸，返回输出空间尺寸."""
    if x.shape[1] != layer.in_channels:
        raise InvalidShapeError(f"{layer.label} 期望 {layer.in_channels} 个输入通道，实际为 {x.shape[1]}")
    out_h, out_w = layer.output_extent(x.shape[2]), layer.output_extent(x.shape[3])
    if out_h < 1 or out_w < 1:
        raise InvalidShapeError(f"{layer.label} 输出尺寸非正: {out_h}×{out_w}")
    return out_h, out_w


def _pad(x: Tensor, padding: int) -> Tensor:
    if padding == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))


def im2col(padded: Tensor, kernel: int) -> Tensor:
    """把已填充的批量输入展开为补丁矩阵.

    Args:
        padded: 形状 [N, C, H, W] 的输入。
        kernel: 卷积核边长。

    Returns:
        Tensor: 形状 [N·H'·W', C·k·k] 的矩阵，列顺序与权重 [C, k, k] 的行主序一致。
    """
    windows = sliding_window_view(padded, (kernel, kernel), axis=(2, 3))
    n, c, out_h, out_w = windows.shape[:4]
    return windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * out_h * out_w, c * kernel * kernel)


def conv2d_forward(inputs: Tensor, layer: ConvLayer) -> Tensor:
    """卷积前向：out[o,y,x] = bias[o] + Σ w[o,c,i,j]·padded_in[c,y+i,x+j].

    Args:
        inputs: [C_in, H, W] 或 [N, C_in, H, W]。
        layer: 卷积层。

    Returns:
        Tensor: [C_out, H', W'] 或 [N, C_out, H', W']。

    Raises:
        InvalidShapeError: 通道数不符或输出尺寸非正。
    """
    x, single = as_batch(inputs, 3)
    out_h, out_w = _check_input(x, layer)
    cols = im2col(_pad(x, layer.padding), layer.kernel)
    w_mat = layer.weights.reshape(layer.out_channels, -1)
    out = cols @ w_mat.T + layer.bias
    out = np.ascontiguousarray(out.reshape(x.shape[0], out_h, out_w, layer.out_channels).transpose(0, 3, 1, 2))
    return out[0] if single else out


def conv2d_backward(grad_out: Tensor, cached_input: Tensor, layer: ConvLayer) -> tuple[Tensor, Tensor, Tensor]:
    """卷积反向.

    Args:
        grad_out: 与前向输出同形状的梯度。
        cached_input: 前向时的输入。
        layer: 卷积层。

    Returns:
        tuple: (grad_input, grad_weights, grad_bias)。

    Raises:
        InvalidShapeError: grad_out 形状与前向输出不一致。
    """
    x, single = as_batch(cached_input, 3)
    g, _ = as_batch(grad_out, 3)
    out_h, out_w = _check_input(x, layer)
    expected = (x.shape[0], layer.out_channels, out_h, out_w)
    if g.shape != expected:
        raise InvalidShapeError(f"{layer.label} 梯度形状应为 {expected}，实际为 {g.shape}")

    k, p = layer.kernel, layer.padding
    n, c, h, w = x.shape
    cols = im2col(_pad(x, p), k)
    g_mat = g.transpose(0, 2, 3, 1).reshape(-1, layer.out_channels)
    w_mat = layer.weights.reshape(layer.out_channels, -1)

    grad_weights = (g_mat.T @ cols).reshape(layer.weights.shape)
    grad_bias = g_mat.sum(axis=0)

    # col2im：把补丁梯度累加回填充后的输入
    grad_cols = (g_mat @ w_mat).reshape(n, out_h, out_w, c, k, k)
    grad_padded = np.zeros((n, c, h + 2 * p, w + 2 * p), dtype=DTYPE)
    for i in range(k):
        for j in range(k):
            grad_padded[:, :, i:i + out_h, j:j + out_w] += grad_cols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
    grad_input = np.ascontiguousarray(grad_padded[:, :, p:p + h, p:p + w])
    return (grad_input[0] if single else grad_input), grad_weights, grad_bias


def conv2d_reference(inputs: Tensor, weights: Tensor, bias: Tensor, padding: int = 0) -> Tensor:
    """卷积的逐元素循环实现，仅用于校验.

    Args:
        inputs: [C_in, H, W]。
        weights: [C_out, C_in, k, k]。
        bias: [C_out]。
        padding: 零填充宽度。

    Returns:
        Tensor: [C_out, H', W']。
    """
    c_out, c_in, k, _ = weights.shape
    padded = np.pad(inputs, ((0, 0), (padding, padding), (padding, padding)))
    out_h = padded.shape[1] - k + 1
    out_w = padded.shape[2] - k + 1
    out = np.zeros((c_out, out_h, out_w), dtype=DTYPE)
    for o in range(c_out):
        for y in range(out_h):
            for x in range(out_w):
                total = bias[o]
                for c in range(c_in):
                    for i in range(k):
                        for j in range(k):
                            total += weights[o, c, i, j] * padded[c, y + i, x + j]
                out[o, y, x] = total
    return out
