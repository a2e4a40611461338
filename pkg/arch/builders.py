#!/usr/bin/env python
"""广义 LeNet / VGG-16 结构生成模块.

LeNet：两层 5×5 卷积（d1、d2 个滤波器，无填充），每层后 ReLU 与 2×2 最大池化，
再接 25·d2 → 120 → 84 → 10 的全连接层。

VGG-16：13 层 3×3 卷积（单像素零填充），每层后接批归一化与 ReLU，
五个卷积组分别含 2、2、3、3、3 层，每组后最大池化；第 n 组（n ≤ 4）有
round(d·growth^(n−1)) 个滤波器，第五组沿用第四组；全连接头为 4096 → 4096 → 10。
增强版第五组为 16d 个滤波器，使守恒律贯穿五组。

滤波器数四舍五入时 .5 远离零。
"""

import logging
import math

from arch.arch_spec import (
    BATCHNORM,
    CONV,
    DENSE,
    FLATTEN,
    INPUT_SHAPE,
    NUM_CLASSES,
    POOL,
    RELU,
    ArchFamily,
    ArchSpec,
    LayerSpec,
)
from utils.errors import InvalidArchitectureError

logger = logging.getLogger(__name__)

# LeNet 原始比例 16/6
LENET_RATIO = 8.0 / 3.0
VGG_GROWTH = 2.0
LENET_KERNEL = 5
LENET_HIDDEN = (120, 84)
VGG_KERNEL = 3
VGG_SET_DEPTHS = (2, 2, 3, 3, 3)
VGG_HIDDEN = (4096, 4096)


def round_half_away(value: float) -> int:
    """四舍五入，.5 远离零."""
    return int(math.copysign(math.floor(abs(value) + 0.5), value))


def _require_positive(name: str, value: int) -> None:
    if value < 1:
        raise InvalidArchitectureError(f"{name} 必须为正整数: {value}")


def _dense_head(in_units: int, hidden: tuple[int, ...]) -> list[LayerSpec]:
    layers = []
    sizes = [in_units, *hidden, NUM_CLASSES]
    for i, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:], strict=True), start=1):
        layers.append(LayerSpec(DENSE, f"dense{i}", in_size=n_in, out_size=n_out))
        if i < len(sizes) - 1:
            layers.append(LayerSpec(RELU, f"relu_dense{i}"))
    return layers


def build_lenet(d1: int, ratio: float = LENET_RATIO, d2_override: int | None = None) -> ArchSpec:
    """构建广义 LeNet.

    Args:
        d1: 第一卷积层滤波器数。
        ratio: d2/d1 比例，缺省为 16/6。
        d2_override: 直接指定 d2（用于 d1=1、2 的两个整数变体）。

    Returns:
        ArchSpec: 结构描述。

    Raises:
        InvalidArchitectureError: d1 或 d2 小于1。
    """
    _require_positive("d1", d1)
    if ratio <= 0:
        raise InvalidArchitectureError(f"比例必须为正: {ratio}")
    d2 = d2_override if d2_override is not None else round_half_away(ratio * d1)
    _require_positive("d2", d2)

    channels, extent = INPUT_SHAPE[0], INPUT_SHAPE[1]
    layers: list[LayerSpec] = []
    for i, filters in enumerate((d1, d2), start=1):
        layers += [
            LayerSpec(CONV, f"conv{i}", in_size=channels, out_size=filters, kernel=LENET_KERNEL, padding=0),
            LayerSpec(RELU, f"relu{i}"),
            LayerSpec(POOL, f"pool{i}"),
        ]
        channels, extent = filters, (extent - LENET_KERNEL + 1) // 2
    layers.append(LayerSpec(FLATTEN, "flatten"))
    layers += _dense_head(channels * extent * extent, LENET_HIDDEN)

    spec = ArchSpec(ArchFamily.LENET, d1, float(ratio), (d1, d2), tuple(layers))
    _validate(spec)
    logger.debug("生成 LeNet: d1=%s d2=%s", d1, d2)
    return spec


def vgg_filter_sets(d: int, growth: float = VGG_GROWTH, fifth: int | None = None) -> tuple[int, ...]:
    """计算 VGG 五个卷积组的滤波器数."""
    _require_positive("d", d)
    if growth <= 0:
        raise InvalidArchitectureError(f"增长常数必须为正: {growth}")
    sets = [round_half_away(d * growth ** (n - 1)) for n in range(1, 5)]
    sets.append(sets[-1] if fifth is None else fifth)
    for n, filters in enumerate(sets, start=1):
        _require_positive(f"第{n}组滤波器数", filters)
    return tuple(sets)


def _build_vgg(family: ArchFamily, d: int, growth: float, sets: tuple[int, ...]) -> ArchSpec:
    layers: list[LayerSpec] = []
    channels, index = INPUT_SHAPE[0], 0
    for set_no, (depth, filters) in enumerate(zip(VGG_SET_DEPTHS, sets, strict=True), start=1):
        for _ in range(depth):
            index += 1
            layers += [
                LayerSpec(CONV, f"conv{index}", in_size=channels, out_size=filters, kernel=VGG_KERNEL, padding=1),
                LayerSpec(BATCHNORM, f"bn{index}", in_size=filters, out_size=filters),
                LayerSpec(RELU, f"relu{index}"),
            ]
            channels = filters
        layers.append(LayerSpec(POOL, f"pool{set_no}"))
    layers.append(LayerSpec(FLATTEN, "flatten"))
    # 32 经过五次池化为 1×1
    layers += _dense_head(channels, VGG_HIDDEN)

    spec = ArchSpec(family, d, float(growth), sets, tuple(layers))
    _validate(spec)
    logger.debug("生成 %s: d=%s 卷积组=%s", family.value, d, sets)
    return spec


def build_vgg16(d: int, growth: float = VGG_GROWTH) -> ArchSpec:
    """构建广义 VGG-16.

    Args:
        d: 第一卷积组滤波器数。
        growth: 相邻卷积组的增长常数，原始结构为2。

    Raises:
        InvalidArchitectureError: 任一组滤波器数小于1。
    """
    return _build_vgg(ArchFamily.VGG16, d, growth, vgg_filter_sets(d, growth))


def build_vgg16_enhanced(d: int) -> ArchSpec:
    """构建增强版 VGG-16，第五组为 16d 个滤波器."""
    _require_positive("d", d)
    return _build_vgg(ArchFamily.VGG16_ENHANCED, d, VGG_GROWTH, vgg_filter_sets(d, VGG_GROWTH, fifth=16 * d))


def build_arch(family: ArchFamily | str, d: int, constant: float | None = None, d2: int | None = None) -> ArchSpec:
    """按族名构建结构，供命令行与配置文件使用.

    Args:
        family: 结构族。
        d: d1 或 d。
        constant: LeNet 比例或 VGG 增长常数，缺省取原始值。
        d2: 仅 LeNet，直接指定 d2。
    """
    family = ArchFamily(family)
    if family is ArchFamily.LENET:
        return build_lenet(d, LENET_RATIO if constant is None else constant, d2)
    if family is ArchFamily.VGG16:
        return build_vgg16(d, VGG_GROWTH if constant is None else constant)
    return build_vgg16_enhanced(d)


def _validate(spec: ArchSpec) -> None:
    """检查族的结构不变量，并确认输出为10个单元."""
    convs = spec.layers_of(CONV)
    denses = spec.layers_of(DENSE)
    if spec.family is ArchFamily.LENET:
        if len(convs) != 2 or len(denses) != 3:
            raise InvalidArchitectureError("LeNet 必须包含2个卷积层和3个全连接层")
    else:
        if len(convs) != 13 or len(denses) != 3:
            raise InvalidArchitectureError("VGG-16 必须包含13个卷积层和3个全连接层")
        pool_after = []
        conv_count = 0
        for layer in spec.layers:
            if layer.kind == CONV:
                conv_count += 1
            elif layer.kind == POOL:
                pool_after.append(conv_count)
        if pool_after != [2, 4, 7, 10, 13]:
            raise InvalidArchitectureError(f"VGG-16 池化位置错误: {pool_after}")
    shapes = spec.shapes()
    if shapes[-1] != (NUM_CLASSES,):
        raise InvalidArchitectureError(f"输出应为 {NUM_CLASSES} 个单元，实际为 {shapes[-1]}")
