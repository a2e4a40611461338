#!/usr/bin/env python
"""网络层基类模块.

定义所有层共享的接口：前向、反向、参数与梯度枚举。具体层应继承此类。
"""

import numpy as np

from cnn.tensor_core import Tensor
from utils.errors import InvalidShapeError

TRAIN = "train"
EVAL = "eval"


def as_batch(inputs: Tensor, sample_ndim: int) -> tuple[Tensor, bool]:
    """把单个样本提升为批量（批大小1）.

    Args:
        inputs: 单样本或批量张量。
        sample_ndim: 单样本的维数。

    Returns:
        tuple[Tensor, bool]: (批量张量, 输入是否为单样本)。
    """
    if inputs.ndim == sample_ndim:
        return inputs[np.newaxis], True
    if inputs.ndim == sample_ndim + 1:
        return inputs, False
    raise InvalidShapeError(f"期望 {sample_ndim} 或 {sample_ndim + 1} 维输入，实际为 {inputs.shape}")


class Layer:
    """网络层基类.

    子类在 forward 中缓存反向所需的数据，缓存只属于当前正在处理的一个批次。
    """

    label: str = "layer"

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """前向计算.

        Args:
            inputs: 批量输入。
            mode: "train" 或 "eval"。
            update_stats: 训练模式下是否更新滑动统计量（仅批归一化使用）。

        Raises:
            NotImplementedError: 该方法需要被子类实现。
        """
        raise NotImplementedError

    def backward(self, grad_out: Tensor) -> Tensor:
        """反向计算，返回对输入的梯度，并保存参数梯度.

        Raises:
            NotImplementedError: 该方法需要被子类实现。
        """
        raise NotImplementedError

    def parameters(self) -> dict[str, Tensor]:
        """可训练参数，键为参数名."""
        return {}

    def gradients(self) -> dict[str, Tensor]:
        """最近一次反向得到的参数梯度，键与 parameters 一致."""
        return {}

    def buffers(self) -> dict[str, Tensor]:
        """不参与训练但需要持久化的状态（如滑动均值）."""
        return {}

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """单样本输入形状对应的输出形状，默认不变."""
        return input_shape
