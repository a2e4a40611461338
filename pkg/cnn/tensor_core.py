#!/usr/bin/env python
"""张量与随机数基础模块.

张量统一使用 float64 的 numpy.ndarray（行主序，C连续）。随机数生成器固定为
NumPy 的 PCG64 位生成器，同一种子产生完全相同的序列。

并行任务的子种子通过 child_seed 派生：以 [seed, *keys] 作为 SeedSequence 的熵，
取生成状态的第一个 uint64。该混合函数固定不变，保证派生结果跨版本可复现。
"""

import logging
from collections.abc import Sequence

import numpy as np

from utils.errors import InvalidParameterError, InvalidShapeError

logger = logging.getLogger(__name__)

# 类型别名
Tensor = np.ndarray
Rng = np.random.Generator

DTYPE = np.float64
SEED_MASK = (1 << 64) - 1


def _validate_shape(shape: Sequence[int]) -> tuple[int, ...]:
    """检查形状中每一维都是正整数."""
    extents = tuple(int(s) for s in shape)
    if not extents or any(s < 1 for s in extents):
        raise InvalidShapeError(f"形状必须由正整数组成: {list(shape)}")
    return extents


def tensor_new(shape: Sequence[int], fill: float = 0.0) -> Tensor:
    """创建指定形状、全部元素为 fill 的张量.

    Args:
        shape: 各维长度，必须都不小于1。
        fill: 填充值。

    Returns:
        Tensor: float64 张量。

    Raises:
        InvalidShapeError: 存在非正的维度。
    """
    return np.full(_validate_shape(shape), fill, dtype=DTYPE)


def reshape(tensor: Tensor, shape: Sequence[int]) -> Tensor:
    """在元素数相同的前提下改变形状，数据按行主序保持不变.

    Raises:
        InvalidShapeError: 目标形状非法或元素数不一致。
    """
    extents = _validate_shape(shape)
    if int(np.prod(extents)) != tensor.size:
        raise InvalidShapeError(f"无法将 {tensor.shape} 变形为 {extents}")
    return np.ascontiguousarray(tensor).reshape(extents)


def ensure_finite(tensor: Tensor, name: str = "tensor") -> Tensor:
    """确认张量不含 NaN/Inf.

    Raises:
        InvalidParameterError: 存在非有限值。
    """
    if not np.all(np.isfinite(tensor)):
        raise InvalidParameterError(f"{name} 含有非有限值")
    return tensor


def make_rng(seed: int) -> Rng:
    """按种子创建 PCG64 随机数生成器.

    Args:
        seed: 64位无符号种子。

    Returns:
        Rng: numpy Generator。
    """
    return np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))


def child_seed(seed: int, *keys: int) -> int:
    """由父种子和若干整数键派生子种子.

    Args:
        seed: 父种子。
        *keys: 区分用途或任务的整数键。

    Returns:
        int: 64位子种子。
    """
    entropy = [int(seed) & SEED_MASK, *(int(k) & SEED_MASK for k in keys)]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def he_normal_init(shape: Sequence[int], fan_in: int, rng: Rng) -> Tensor:
    """He 正态初始化：均值0、标准差 sqrt(2/fan_in) 的独立高斯样本.

    Args:
        shape: 张量形状。
        fan_in: 输入扇入，必须不小于1。
        rng: 随机数生成器。

    Returns:
        Tensor: 初始化后的张量。

    Raises:
        InvalidParameterError: fan_in 小于1。
        InvalidShapeError: 形状非法。
    """
    if fan_in < 1:
        raise InvalidParameterError(f"fan_in 必须为正整数: {fan_in}")
    extents = _validate_shape(shape)
    std = np.sqrt(2.0 / fan_in)
    return rng.normal(0.0, std, size=extents).astype(DTYPE, copy=False)
