#!/usr/bin/env python
"""批归一化模块.

训练模式按当前批次逐通道的均值/方差（有偏）归一化，并以 momentum 更新滑动统计；
滑动方差使用无偏估计。评估模式使用滑动统计。支持 [N, C] 与 [N, C, H, W] 输入。
"""

from dataclasses import dataclass

import numpy as np

from cnn.layer import EVAL, TRAIN, Layer
from cnn.tensor_core import DTYPE, Tensor
from utils.errors import InvalidBatchError, InvalidParameterError, InvalidShapeError

DEFAULT_EPSILON = 1e-5
DEFAULT_MOMENTUM = 0.1


@dataclass
class BatchNormCache:
    """训练模式前向保存的中间量."""

    normalized: Tensor
    inv_std: Tensor
    axes: tuple[int, ...]


class BatchNormLayer(Layer):
    """批归一化层."""

    def __init__(self, channels: int, epsilon: float = DEFAULT_EPSILON, momentum: float = DEFAULT_MOMENTUM,
                 label: str = "batchnorm") -> None:
        """初始化批归一化层.

        Args:
            channels: 通道数。
            epsilon: 方差下限保护。
            momentum: 滑动统计更新系数，取值 (0, 1)。
            label: 层标签。
        """
        if channels < 1:
            raise InvalidShapeError(f"通道数必须为正: {channels}")
        if epsilon <= 0 or not 0.0 < momentum < 1.0:
            raise InvalidParameterError(f"epsilon={epsilon} 或 momentum={momentum} 非法")
        self.channels = channels
        self.epsilon = epsilon
        self.momentum = momentum
        self.label = label
        self.scale = np.ones(channels, dtype=DTYPE)
        self.shift = np.zeros(channels, dtype=DTYPE)
        self.running_mean = np.zeros(channels, dtype=DTYPE)
        self.running_var = np.ones(channels, dtype=DTYPE)
        self.grad_scale = np.zeros_like(self.scale)
        self.grad_shift = np.zeros_like(self.shift)
        self._cache: BatchNormCache | None = None

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """前向."""
        out, self._cache = batchnorm_forward(inputs, self, mode, update_stats)
        return out

    def backward(self, grad_out: Tensor) -> Tensor:
        """训练模式映射的精确反向."""
        if self._cache is None:
            raise InvalidShapeError(f"{self.label} 需要先执行训练模式前向")
        grad_input, self.grad_scale, self.grad_shift = batchnorm_backward(grad_out, self._cache, self)
        return grad_input

    def parameters(self) -> dict[str, Tensor]:
        """缩放与平移参数."""
        return {"scale": self.scale, "shift": self.shift}

    def gradients(self) -> dict[str, Tensor]:
        """缩放与平移梯度."""
        return {"scale": self.grad_scale, "shift": self.grad_shift}

    def buffers(self) -> dict[str, Tensor]:
        """滑动均值与方差."""
        return {"running_mean": self.running_mean, "running_var": self.running_var}


def _channel_view(x: Tensor, channels: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """返回 (归约轴, 参数广播形状)."""
    if x.ndim == 2:
        axes, shape = (0,), (1, channels)
    elif x.ndim == 4:
        axes, shape = (0, 2, 3), (1, channels, 1, 1)
    else:
        raise InvalidShapeError(f"批归一化只支持 [N,C] 或 [N,C,H,W] 输入，实际为 {x.shape}")
    if x.shape[1] != channels:
        raise InvalidShapeError(f"批归一化期望 {channels} 个通道，实际为 {x.shape[1]}")
    return axes, shape


def batchnorm_forward(inputs: Tensor, layer: BatchNormLayer, mode: str = TRAIN,
                      update_stats: bool = True) -> tuple[Tensor, BatchNormCache | None]:
    """批归一化前向.

    Args:
        inputs: 批量输入。
        layer: 批归一化层。
        mode: "train" 使用批统计，"eval" 使用滑动统计。
        update_stats: 训练模式下是否更新滑动统计。

    Returns:
        tuple: (输出, 训练模式的反向缓存；评估模式为None)。

    Raises:
        InvalidBatchError: 训练模式下批大小为1。
    """
    axes, shape = _channel_view(inputs, layer.channels)
    scale = layer.scale.reshape(shape)
    shift = layer.shift.reshape(shape)
    if mode == EVAL:
        inv_std = 1.0 / np.sqrt(layer.running_var.reshape(shape) + layer.epsilon)
        return (inputs - layer.running_mean.reshape(shape)) * inv_std * scale + shift, None
    if mode != TRAIN:
        raise InvalidParameterError(f"未知模式: {mode}")
    if inputs.shape[0] < 2:
        raise InvalidBatchError("训练模式的批归一化要求批大小不小于2")

    mean = inputs.mean(axis=axes, keepdims=True)
    var = inputs.var(axis=axes, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + layer.epsilon)
    normalized = (inputs - mean) * inv_std

    if update_stats:
        count = inputs.size // layer.channels
        unbiased = var.reshape(-1) * count / (count - 1)
        layer.running_mean[:] = (1.0 - layer.momentum) * layer.running_mean + layer.momentum * mean.reshape(-1)
        layer.running_var[:] = (1.0 - layer.momentum) * layer.running_var + layer.momentum * unbiased

    return normalized * scale + shift, BatchNormCache(normalized=normalized, inv_std=inv_std, axes=axes)


def batchnorm_backward(grad_out: Tensor, cache: BatchNormCache,
                       layer: BatchNormLayer) -> tuple[Tensor, Tensor, Tensor]:
    """训练模式批归一化的精确反向，返回 (grad_input, grad_scale, grad_shift)."""
    if grad_out.shape != cache.normalized.shape:
        raise InvalidShapeError(f"批归一化梯度形状 {grad_out.shape} 与前向输出 {cache.normalized.shape} 不一致")
    axes = cache.axes
    _, shape = _channel_view(grad_out, layer.channels)
    count = grad_out.size // layer.channels

    grad_scale = np.sum(grad_out * cache.normalized, axis=axes)
    grad_shift = np.sum(grad_out, axis=axes)

    grad_norm = grad_out * layer.scale.reshape(shape)
    grad_input = cache.inv_std / count * (
        count * grad_norm
        - grad_norm.sum(axis=axes, keepdims=True)
        - cache.normalized * np.sum(grad_norm * cache.normalized, axis=axes, keepdims=True)
    )
    return grad_input, grad_scale, grad_shift
