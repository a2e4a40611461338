#!/usr/bin/env python
"""乘加运算（MAdd）计数模块.

卷积层计 H_out·W_out·k²·C_in·C_out，全连接层计 in·out；池化、激活、批归一化和偏置
都不计入。forward 模式给出单张输入一次前向的计数；forward_plus_backward 模式按
常用估算取前向的3倍。
"""

from dataclasses import dataclass
from enum import StrEnum

from arch.arch_spec import CONV, DENSE, ArchSpec

GIGA = 10**9
BACKWARD_MULTIPLIER = 3


class CountMode(StrEnum):
    """计数口径."""

    FORWARD = "forward"
    FORWARD_PLUS_BACKWARD = "forward_plus_backward"


@dataclass(frozen=True)
class LayerCount:
    """单层计数."""

    index: int
    label: str
    madds: int


@dataclass(frozen=True)
class MAddReport:
    """逐层与总计的 MAdd 报告，total 等于逐层之和."""

    layers: tuple[LayerCount, ...]
    mode: CountMode

    @property
    def total(self) -> int:
        """总 MAdd."""
        return sum(layer.madds for layer in self.layers)

    @property
    def gmadds(self) -> float:
        """以 GMAdd（10⁹）为单位的总数."""
        return self.total / GIGA

    def nonzero(self) -> list[LayerCount]:
        """只保留有计数的层（卷积与全连接）."""
        return [layer for layer in self.layers if layer.madds]


def madds(spec: ArchSpec, mode: CountMode | str = CountMode.FORWARD) -> MAddReport:
    """统计结构的 MAdd.

    Args:
        spec: 结构描述。
        mode: 计数口径。

    Returns:
        MAddReport: 逐层计数。计数只依赖形状，与权重取值无关。
    """
    mode = CountMode(mode)
    multiplier = BACKWARD_MULTIPLIER if mode is CountMode.FORWARD_PLUS_BACKWARD else 1
    counts = []
    for index, (layer, out_shape) in enumerate(zip(spec.layers, spec.shapes(), strict=True), start=1):
        if layer.kind == CONV:
            _, out_h, out_w = out_shape
            count = out_h * out_w * layer.kernel * layer.kernel * layer.in_size * layer.out_size
        elif layer.kind == DENSE:
            count = layer.in_size * layer.out_size
        else:
            count = 0
        counts.append(LayerCount(index, layer.label, count * multiplier))
    return MAddReport(layers=tuple(counts), mode=mode)


def parameter_count(spec: ArchSpec, include_bias: bool = True) -> int:
    """统计卷积与全连接层的权重数（可选含偏置）."""
    total = 0
    for layer in spec.layers:
        if layer.kind == CONV:
            total += layer.kernel * layer.kernel * layer.in_size * layer.out_size
        elif layer.kind == DENSE:
            total += layer.in_size * layer.out_size
        else:
            continue
        if include_bias:
            total += layer.out_size
    return total
