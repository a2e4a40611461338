#!/usr/bin/env python
"""有限差分梯度检查模块.

对每个参数张量随机抽取若干元素，用中心差分 (L(w+h) − L(w−h)) / 2h 与反向传播的
解析梯度比较。若扰动改变了 ReLU 激活模式或池化 argmax（跨过不可导点），该元素跳过。

相对误差定义为 |a − n| / max(|a|, |n|, floor)，floor 防止接近零的梯度被浮点噪声放大。
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from cnn.network import Network
from cnn.tensor_core import Tensor, ensure_finite, make_rng
from utils.errors import GradientCheckError, InvalidParameterError

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-6
DEFAULT_SAMPLES = 100
DEFAULT_FLOOR = 1e-3


@dataclass
class ParameterCheck:
    """单个参数张量的检查结果."""

    name: str
    checked: int = 0
    skipped: int = 0
    worst_index: int = -1
    worst_error: float = 0.0
    worst_analytic: float = 0.0
    worst_numeric: float = 0.0


@dataclass
class GradientCheckReport:
    """梯度检查报告."""

    tolerance: float
    parameters: list[ParameterCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """所有参数都在容差内."""
        return all(p.worst_error < self.tolerance for p in self.parameters)

    def worst_by_layer(self) -> dict[str, ParameterCheck]:
        """每层误差最大的参数."""
        worst: dict[str, ParameterCheck] = {}
        for check in self.parameters:
            layer = check.name.split(".")[0]
            if layer not in worst or check.worst_error > worst[layer].worst_error:
                worst[layer] = check
        return worst


def _same_signature(a: list[Tensor], b: list[Tensor]) -> bool:
    return all(np.array_equal(x, y) for x, y in zip(a, b, strict=True))


def gradient_check(network: Network, inputs: Tensor, labels: np.ndarray, tolerance: float = 1e-4,
                   samples: int = DEFAULT_SAMPLES, step: float = DEFAULT_STEP, floor: float = DEFAULT_FLOOR,
                   seed: int = 0, raise_on_failure: bool = True) -> GradientCheckReport:
    """检查网络所有参数的反向传播梯度.

    损失为训练模式下的平均交叉熵，检查期间不更新批归一化滑动统计。

    Args:
        network: 待检查网络（64位参数）。
        inputs: 一个批次的输入。
        labels: 对应标签。
        tolerance: 允许的最大相对误差。
        samples: 每个参数张量抽取的元素数（不超过张量大小）。
        step: 差分步长。
        floor: 相对误差分母的下限。
        seed: 抽样种子。
        raise_on_failure: 有元素超出容差时是否抛出异常。

    Returns:
        GradientCheckReport: 每个参数张量的最差元素。

    Raises:
        GradientCheckError: raise_on_failure 为真且有元素超出容差。
        InvalidParameterError: 参数非法或输入含 NaN/Inf。
    """
    if samples < 1 or step <= 0:
        raise InvalidParameterError(f"samples={samples} step={step} 非法")
    ensure_finite(inputs, "梯度检查输入")
    rng = make_rng(seed)

    network.loss_and_gradients(inputs, labels, update_stats=False)
    base_signature = [np.copy(s) for s in network.activation_signature()]
    analytic = [(name, param, np.copy(grad)) for name, param, grad in network.named_parameters()]

    def perturbed_loss(param: Tensor, index: int, value: float) -> tuple[float, bool]:
        param.flat[index] = value
        loss = network.loss_and_gradients(inputs, labels, update_stats=False)
        return loss, _same_signature(base_signature, network.activation_signature())

    report = GradientCheckReport(tolerance=tolerance)
    for name, param, grad in analytic:
        check = ParameterCheck(name)
        count = min(samples, param.size)
        for index in rng.choice(param.size, size=count, replace=False):
            original = float(param.flat[index])
            loss_plus, same_plus = perturbed_loss(param, index, original + step)
            loss_minus, same_minus = perturbed_loss(param, index, original - step)
            param.flat[index] = original
            if not (same_plus and same_minus):
                check.skipped += 1
                continue
            numeric = (loss_plus - loss_minus) / (2.0 * step)
            exact = float(grad.flat[index])
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
            check.checked += 1
            if error >= check.worst_error:
                check.worst_index, check.worst_error = int(index), error
                check.worst_analytic, check.worst_numeric = exact, numeric
        logger.debug("%s: 检查 %s 个，跳过 %s 个，最大相对误差 %.3e", name, check.checked, check.skipped, check.worst_error)
        report.parameters.append(check)

    # 恢复各层缓存与梯度到未扰动状态
    network.loss_and_gradients(inputs, labels, update_stats=False)

    if raise_on_failure:
        for check in report.parameters:
            if check.worst_error >= tolerance:
                raise GradientCheckError(check.name, check.worst_index, check.worst_error, tolerance)
    return report
