#!/usr/bin/env python
"""守恒律审计模块.

守恒律：卷积块深度 depth_i 与其空间边长 m_i 的乘积保持常数。
LeNet 取池化后的边长（14、5），VGG 取池化前卷积组的边长（32、16、8、4、2）。
"""

from dataclasses import dataclass

from arch.arch_spec import CONV, POOL, ArchFamily, ArchSpec
from utils.errors import InvalidArchitectureError


@dataclass(frozen=True)
class ConservationBlock:
    """单个卷积块的审计结果."""

    depth: int
    extent: int

    @property
    def product(self) -> int:
        """depth × m."""
        return self.depth * self.extent


@dataclass(frozen=True)
class ConservationReport:
    """守恒律审计报告.

    Attributes:
        blocks: 各卷积块。
        deviation: 乘积的极差与均值之比，非负；0 表示严格守恒。
    """

    blocks: tuple[ConservationBlock, ...]
    deviation: float

    @property
    def products(self) -> list[int]:
        """各块的 depth × m."""
        return [block.product for block in self.blocks]

    def relative_deviations(self) -> list[float]:
        """各块乘积相对均值的偏差."""
        mean = sum(self.products) / len(self.blocks)
        return [(p - mean) / mean for p in self.products]


def conservation_report(spec: ArchSpec) -> ConservationReport:
    """审计结构的守恒律.

    Args:
        spec: 至少含一个卷积块的结构。

    Returns:
        ConservationReport: 各块 (depth, m, depth·m) 与偏差。
    """
    shapes = spec.shapes()
    use_pooled = spec.family is ArchFamily.LENET
    blocks = []
    last_conv_shape: tuple[int, ...] | None = None
    for layer, shape in zip(spec.layers, shapes, strict=True):
        if layer.kind == CONV:
            last_conv_shape = shape
        elif layer.kind == POOL and last_conv_shape is not None:
            extent = shape[1] if use_pooled else last_conv_shape[1]
            blocks.append(ConservationBlock(depth=last_conv_shape[0], extent=extent))
            last_conv_shape = None
    if not blocks:
        raise InvalidArchitectureError(f"{spec.label} 没有卷积块")

    products = [block.product for block in blocks]
    mean = sum(products) / len(products)
    deviation = (max(products) - min(products)) / mean
    return ConservationReport(blocks=tuple(blocks), deviation=deviation)
