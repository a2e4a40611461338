#!/usr/bin/env python
"""由结构描述实例化的前馈网络模块."""

import logging
from collections.abc import Iterator

import numpy as np

from arch.arch_spec import BATCHNORM, CONV, DENSE, FLATTEN, POOL, RELU, ArchSpec
from cnn.activation import ReLULayer
from cnn.batchnorm import DEFAULT_EPSILON, DEFAULT_MOMENTUM, BatchNormLayer
from cnn.conv import ConvLayer
from cnn.dense import DenseLayer, FlattenLayer
from cnn.layer import EVAL, TRAIN, Layer
from cnn.loss import batch_cross_entropy
from cnn.pooling import PoolLayer
from cnn.tensor_core import DTYPE, Rng, Tensor, ensure_finite, he_normal_init
from utils.errors import InvalidShapeError

logger = logging.getLogger(__name__)


class Network:
    """按层顺序执行前向/反向的网络.

    层对象在一个批次的前向与反向之间持有缓存，同一时刻只处理一个批次。
    """

    def __init__(self, spec: ArchSpec, layers: list[Layer]) -> None:
        """初始化网络.

        Args:
            spec: 结构描述。
            layers: 与 spec.layers 一一对应的层对象。
        """
        if len(layers) != len(spec.layers):
            raise InvalidShapeError(f"层数 {len(layers)} 与结构描述 {len(spec.layers)} 不一致")
        self.spec = spec
        self.layers = layers

    def forward(self, inputs: Tensor, mode: str = TRAIN, update_stats: bool = True) -> Tensor:
        """批量前向，返回 [N, 10] 的输出.

        Args:
            inputs: [N, 3, m, m] 输入。
            mode: "train" 或 "eval"。
            update_stats: 训练模式下是否更新批归一化滑动统计。
        """
        if inputs.shape[1:] != self.spec.input_shape:
            raise InvalidShapeError(f"输入形状 {inputs.shape[1:]} 与结构 {self.spec.input_shape} 不符")
        x = ensure_finite(inputs, "网络输入")
        for layer in self.layers:
            x = layer.forward(x, mode, update_stats)
        return x

    def backward(self, grad_logits: Tensor) -> Tensor:
        """从输出梯度反向传播到输入，各层保存参数梯度."""
        grad = grad_logits
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def loss_and_gradients(self, inputs: Tensor, labels: np.ndarray, update_stats: bool = True) -> float:
        """训练模式前向 + 平均交叉熵 + 反向，返回损失."""
        logits = self.forward(inputs, TRAIN, update_stats)
        loss, grad = batch_cross_entropy(logits, labels)
        self.backward(grad)
        return loss

    def predict(self, inputs: Tensor, batch_size: int = 500) -> Tensor:
        """评估模式分批前向."""
        outputs = [self.forward(inputs[i:i + batch_size], EVAL) for i in range(0, inputs.shape[0], batch_size)]
        return np.concatenate(outputs, axis=0)

    def named_parameters(self) -> Iterator[tuple[str, Tensor, Tensor]]:
        """依次给出 (名称, 参数, 梯度)，名称形如 conv1.weights."""
        for layer in self.layers:
            grads = layer.gradients()
            for name, param in layer.parameters().items():
                yield f"{layer.label}.{name}", param, grads[name]

    def state_blocks(self) -> list[tuple[str, Tensor]]:
        """需要持久化的全部张量（参数后接缓冲区），顺序固定."""
        blocks = []
        for layer in self.layers:
            for name, tensor in {**layer.parameters(), **layer.buffers()}.items():
                blocks.append((f"{layer.label}.{name}", tensor))
        return blocks

    def activation_signature(self) -> list[Tensor]:
        """最近一次前向的分段线性模式：ReLU 激活掩码与池化 argmax."""
        signature = []
        for layer in self.layers:
            if isinstance(layer, ReLULayer):
                signature.append(layer.mask())
            elif isinstance(layer, PoolLayer):
                signature.append(layer.argmax)
        return signature

    def parameter_count(self) -> int:
        """可训练参数总数."""
        return sum(param.size for _, param, _ in self.named_parameters())


def build_network(spec: ArchSpec, rng: Rng, bn_epsilon: float = DEFAULT_EPSILON,
                  bn_momentum: float = DEFAULT_MOMENTUM) -> Network:
    """按结构描述实例化网络：He 正态权重、零偏置，批归一化缩放1平移0.

    Args:
        spec: 结构描述。
        rng: 权重初始化用随机数生成器。
        bn_epsilon: 批归一化 epsilon。
        bn_momentum: 批归一化滑动统计系数。

    Returns:
        Network: 网络实例。
    """
    layers: list[Layer] = []
    for layer in spec.layers:
        if layer.kind == CONV:
            fan_in = layer.in_size * layer.kernel * layer.kernel
            shape = (layer.out_size, layer.in_size, layer.kernel, layer.kernel)
            layers.append(ConvLayer(layer.in_size, layer.out_size, layer.kernel, layer.padding,
                                    weights=he_normal_init(shape, fan_in, rng), label=layer.label))
        elif layer.kind == DENSE:
            weights = he_normal_init((layer.out_size, layer.in_size), layer.in_size, rng)
            layers.append(DenseLayer(layer.in_size, layer.out_size, weights=weights, label=layer.label))
        elif layer.kind == BATCHNORM:
            layers.append(BatchNormLayer(layer.in_size, bn_epsilon, bn_momentum, label=layer.label))
        elif layer.kind == RELU:
            layers.append(ReLULayer(layer.label))
        elif layer.kind == POOL:
            layers.append(PoolLayer(layer.label))
        elif layer.kind == FLATTEN:
            layers.append(FlattenLayer(layer.label))
    network = Network(spec, layers)
    logger.debug("实例化网络 %s，参数 %s 个", spec.label, network.parameter_count())
    return network


def zeros_like_parameters(network: Network) -> list[Tensor]:
    """与参数同形状的零张量列表（例如动量缓冲）."""
    return [np.zeros_like(param, dtype=DTYPE) for _, param, _ in network.named_parameters()]
