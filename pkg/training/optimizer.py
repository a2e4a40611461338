#!/usr/bin/env python
"""带 Nesterov 动量与 L2 正则的随机梯度下降模块.

采用复用梯度的写法（不在前瞻点重新求梯度）：

    g' = g + α·w
    v  ← μ·v + g'
    w  ← w − η·(g' + μ·v)

L2 项加在梯度上（耦合式权重衰减），在动量之前。
"""

import numpy as np

from cnn.network import Network, zeros_like_parameters
from cnn.tensor_core import Tensor
from utils.errors import InvalidShapeError


def sgd_nesterov_step(weights: Tensor, gradients: Tensor, velocity: Tensor,
                      eta: float, mu: float, alpha: float) -> tuple[Tensor, Tensor]:
    """单个张量的一步更新，返回新的 (weights, velocity)，不修改输入.

    Raises:
        InvalidShapeError: 三个张量形状不一致。
    """
    if not weights.shape == gradients.shape == velocity.shape:
        raise InvalidShapeError(f"形状不一致: w{weights.shape} g{gradients.shape} v{velocity.shape}")
    step = gradients + alpha * weights
    velocity = mu * velocity + step
    return weights - eta * (step + mu * velocity), velocity


class NesterovSGD:
    """对整个网络原地执行 Nesterov 更新.

    L2 默认只作用于卷积和全连接层的权重；decay_biases 为 True 时也作用于偏置。
    批归一化的缩放与平移不做衰减。
    """

    def __init__(self, network: Network, mu: float, alpha: float, decay_biases: bool = False) -> None:
        """初始化优化器.

        Args:
            network: 待更新的网络。
            mu: 动量常数。
            alpha: L2 系数。
            decay_biases: 偏置是否参与 L2。
        """
        self.network = network
        self.mu = mu
        self.alpha = alpha
        decayed = ("weights", "bias") if decay_biases else ("weights",)
        self.decay = [alpha if name.rsplit(".", 1)[1] in decayed else 0.0 for name, _, _ in network.named_parameters()]
        self.velocity = zeros_like_parameters(network)

    def step(self, eta: float) -> None:
        """用各层当前保存的梯度更新参数."""
        params = self.network.named_parameters()
        for (_, weights, gradients), velocity, alpha in zip(params, self.velocity, self.decay, strict=True):
            step = gradients + alpha * weights if alpha else gradients.copy()
            velocity *= self.mu
            velocity += step
            step += self.mu * velocity
            weights -= eta * step

    def velocity_norm(self) -> float:
        """全部动量缓冲的 L2 范数."""
        return float(np.sqrt(sum(float(np.sum(v * v)) for v in self.velocity)))
