#!/usr/bin/env python
"""网络结构描述模块.

ArchSpec 只描述结构（层序列和族元数据），不分配权重；权重在 cnn.network 中实例化。
"""

from dataclasses import dataclass, field
from enum import StrEnum

from utils.errors import InvalidArchitectureError

CONV = "conv"
BATCHNORM = "batchnorm"
RELU = "relu"
POOL = "pool"
FLATTEN = "flatten"
DENSE = "dense"
LAYER_KINDS = (CONV, BATCHNORM, RELU, POOL, FLATTEN, DENSE)

INPUT_SHAPE = (3, 32, 32)
NUM_CLASSES = 10


class ArchFamily(StrEnum):
    """结构族."""

    LENET = "lenet"
    VGG16 = "vgg16"
    VGG16_ENHANCED = "vgg16-enhanced"


@dataclass(frozen=True)
class LayerSpec:
    """单层描述.

    conv 使用 in_size/out_size 表示通道数，并带 kernel 与 padding；
    dense 使用 in_size/out_size 表示单元数；batchnorm 的 in_size = out_size = 通道数。
    """

    kind: str
    label: str
    in_size: int | None = None
    out_size: int | None = None
    kernel: int | None = None
    padding: int = 0

    def __post_init__(self) -> None:
        """检查层类型."""
        if self.kind not in LAYER_KINDS:
            raise InvalidArchitectureError(f"未知层类型: {self.kind}")


@dataclass(frozen=True)
class ArchSpec:
    """网络结构描述.

    Attributes:
        family: 结构族。
        d: 基础滤波器数（LeNet 为 d1，VGG 为 d）。
        constant: LeNet 的 d2/d1 比例或 VGG 的逐组增长常数。
        filters: 各卷积块的滤波器数（LeNet 为 (d1, d2)，VGG 为五个卷积组）。
        layers: 有序层描述。
        input_shape: 单个输入的形状 [3, m, m]。
    """

    family: ArchFamily
    d: int
    constant: float
    filters: tuple[int, ...]
    layers: tuple[LayerSpec, ...]
    input_shape: tuple[int, int, int] = field(default=INPUT_SHAPE)

    def shapes(self) -> list[tuple[int, ...]]:
        """从输入形状逐层推导每一层的单样本输出形状.

        Returns:
            list: 与 layers 等长的输出形状列表。

        Raises:
            InvalidArchitectureError: 某层维数不匹配或尺寸非正。
        """
        shape: tuple[int, ...] = self.input_shape
        result = []
        for layer in self.layers:
            shape = layer_output_shape(layer, shape)
            result.append(shape)
        return result

    def layers_of(self, kind: str) -> list[LayerSpec]:
        """指定类型的层."""
        return [layer for layer in self.layers if layer.kind == kind]

    @property
    def label(self) -> str:
        """简短描述，例如 lenet-d6-c2.6667."""
        return f"{self.family.value}-d{self.d}-c{self.constant:g}"


def layer_output_shape(layer: LayerSpec, shape: tuple[int, ...]) -> tuple[int, ...]:
    """按层类型的形状规则计算输出形状."""
    if layer.kind == CONV:
        if len(shape) != 3 or shape[0] != layer.in_size:
            raise InvalidArchitectureError(f"{layer.label} 输入形状 {shape} 与 {layer.in_size} 个输入通道不符")
        extent = shape[1] + 2 * layer.padding - layer.kernel + 1
        if extent < 1 or layer.out_size < 1:
            raise InvalidArchitectureError(f"{layer.label} 输出尺寸非正")
        return (layer.out_size, extent, extent)
    if layer.kind == POOL:
        if len(shape) != 3 or shape[1] < 2:
            raise InvalidArchitectureError(f"{layer.label} 无法对 {shape} 池化")
        return (shape[0], shape[1] // 2, shape[2] // 2)
    if layer.kind == FLATTEN:
        size = 1
        for extent in shape:
            size *= extent
        return (size,)
    if layer.kind == DENSE:
        if shape != (layer.in_size,) or layer.out_size < 1:
            raise InvalidArchitectureError(f"{layer.label} 输入 {shape} 与 {layer.in_size} 不符")
        return (layer.out_size,)
    if layer.kind == BATCHNORM and shape[0] != layer.in_size:
        raise InvalidArchitectureError(f"{layer.label} 通道数 {layer.in_size} 与输入 {shape} 不符")
    return shape
