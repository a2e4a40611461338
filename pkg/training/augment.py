#!/usr/bin/env python
"""数据增强模块：随机水平翻转与最多4像素的平移.

平移后空出的像素填0，即归一化后的中间值。
"""

import numpy as np

from cnn.tensor_core import Rng, Tensor

MAX_SHIFT = 4


def flip_horizontal(image: Tensor) -> Tensor:
    """左右翻转 [..., H, W] 图像."""
    return image[..., ::-1].copy()


def translate(image: Tensor, dx: int, dy: int) -> Tensor:
    """平移图像，dx 向右、dy 向下为正.

    输出满足 out[..., r, c] = image[..., r − dy, c − dx]，越界处为0。
    """
    height, width = image.shape[-2:]
    out = np.zeros_like(image)
    if abs(dx) >= width or abs(dy) >= height:
        return out
    src_r = slice(max(0, -dy), height - max(0, dy))
    dst_r = slice(max(0, dy), height - max(0, -dy))
    src_c = slice(max(0, -dx), width - max(0, dx))
    dst_c = slice(max(0, dx), width - max(0, -dx))
    out[..., dst_r, dst_c] = image[..., src_r, src_c]
    return out


def augment(image: Tensor, rng: Rng, max_shift: int = MAX_SHIFT) -> Tensor:
    """以1/2概率翻转，再按 {−max_shift, …, max_shift}² 中均匀抽取的位移平移.

    Args:
        image: [3, 32, 32] 归一化图像。
        rng: 随机数生成器。
        max_shift: 最大位移。
    """
    if rng.random() < 0.5:
        image = flip_horizontal(image)
    dx, dy = rng.integers(-max_shift, max_shift + 1, size=2)
    return translate(image, int(dx), int(dy))


def augment_batch(images: Tensor, rng: Rng, max_shift: int = MAX_SHIFT) -> Tensor:
    """逐张增强 [N, 3, 32, 32]，按样本顺序消耗随机数."""
    return np.stack([augment(image, rng, max_shift) for image in images], axis=0)
