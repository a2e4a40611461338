#!/usr/bin/env python
"""分数 d 的对数插值模块.

当守恒律给出非整数 d2（例如 d1=1 时 d2=8/3）时，在两侧整数 d2 的训练结果之间，
按 (ln d, ln ε) 线性插值。靠近哪个端点，哪个端点的权重就大。
"""

import math

from scaling.power_law import ScalingPoint
from utils.errors import InterpolationRangeError


def _log_lerp(weight_hi: float, lo: float, hi: float) -> float:
    return math.exp((1.0 - weight_hi) * math.log(lo) + weight_hi * math.log(hi))


def log_interpolate(d_target: float, lo: ScalingPoint, hi: ScalingPoint) -> float:
    """对数插值得到 ε(d_target).

    Args:
        d_target: 目标 d，满足 lo.d ≤ d_target ≤ hi.d（端点返回端点值）。
        lo: 较小 d 的数据点。
        hi: 较大 d 的数据点。

    Returns:
        float: 插值误差。

    Raises:
        InterpolationRangeError: 目标超出区间或端点顺序错误。
    """
    if not lo.d < hi.d:
        raise InterpolationRangeError(f"端点顺序错误: {lo.d} ≥ {hi.d}")
    if not lo.d <= d_target <= hi.d:
        raise InterpolationRangeError(f"d={d_target} 不在 [{lo.d}, {hi.d}] 内")
    weight_hi = (math.log(d_target) - math.log(lo.d)) / (math.log(hi.d) - math.log(lo.d))
    return _log_lerp(weight_hi, lo.epsilon, hi.epsilon)


def interpolate_fractional_d2(d1: int, ratio: float, lo: ScalingPoint, hi: ScalingPoint) -> ScalingPoint:
    """为非整数 d2 = ratio·d1 合成一个以 d1 为横坐标的数据点.

    Args:
        d1: 第一卷积层滤波器数。
        ratio: d2/d1。
        lo: d2 取下方整数时的结果（d 字段为该 d2）。
        hi: d2 取上方整数时的结果。

    Returns:
        ScalingPoint: d=d1，ε 与 std（两端都有时）均按同一权重做对数插值。
    """
    target = ratio * d1
    epsilon = log_interpolate(target, lo, hi)
    std = None
    if lo.std and hi.std:
        weight_hi = (math.log(target) - math.log(lo.d)) / (math.log(hi.d) - math.log(lo.d))
        std = _log_lerp(weight_hi, lo.std, hi.std)
    return ScalingPoint(d=d1, epsilon=epsilon, std=std)
