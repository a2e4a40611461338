#!/usr/bin/env python
"""幂律标度拟合模块.

误差随滤波器数按 ε = A / d^ρ 衰减。拟合在 (ln d, ln ε) 上做普通最小二乘：
斜率为 −ρ，截距为 ln A。可选按 ε/std 加权（ln ε 的近似标准差为 std/ε）。
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from utils.errors import FitError, InvalidParameterError, NoSolutionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalingPoint:
    """一个 (d, ε) 数据点，std 可缺省."""

    d: float
    epsilon: float
    std: float | None = None

    def __post_init__(self) -> None:
        """检查取值范围."""
        if not self.d > 0:
            raise InvalidParameterError(f"d 必须为正: {self.d}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidParameterError(f"ε 必须在 (0, 1) 内: {self.epsilon}")
        if self.std is not None and self.std < 0:
            raise InvalidParameterError(f"std 不能为负: {self.std}")


@dataclass(frozen=True)
class PowerLawFit:
    """幂律拟合结果.

    Attributes:
        A: 前置因子，恒为正。
        rho: 指数 ρ。
        residual: ln ε 残差平方和。
        n_points: 参与拟合的点数。
    """

    A: float  # noqa: N815
    rho: float
    residual: float
    n_points: int

    def __call__(self, d: float) -> float:
        """等价于 extrapolate_error."""
        return extrapolate_error(self, d)


def fit_power_law(points: Sequence[ScalingPoint], weighted: bool = False) -> PowerLawFit:
    """在对数坐标上拟合 ε = A / d^ρ.

    Args:
        points: 至少含两个不同 d 的数据点。
        weighted: 是否按 ε/std 加权，需要每个点都有正的 std。

    Returns:
        PowerLawFit: 拟合结果。

    Raises:
        FitError: 点数不足、d 全部相同或 ε 非正。
    """
    if len(points) < 2:
        raise FitError(f"幂律拟合至少需要2个点，实际为 {len(points)}")
    d = np.asarray([p.d for p in points], dtype=np.float64)
    eps = np.asarray([p.epsilon for p in points], dtype=np.float64)
    if np.any(eps <= 0):
        raise FitError("ε 必须为正")
    if np.unique(d).size < 2:
        raise FitError("幂律拟合至少需要2个不同的 d")

    x, y = np.log(d), np.log(eps)
    weights = None
    if weighted:
        stds = [p.std for p in points]
        if any(s is None or s <= 0 for s in stds):
            raise FitError("加权拟合要求每个点都有正的 std")
        weights = eps / np.asarray(stds, dtype=np.float64)

    slope, intercept = np.polyfit(x, y, 1, w=weights)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    fit = PowerLawFit(A=float(np.exp(intercept)), rho=float(-slope), residual=residual, n_points=len(points))
    logger.debug("幂律拟合: A=%.6f rho=%.6f residual=%.3e", fit.A, fit.rho, fit.residual)
    return fit


def extrapolate_error(fit: PowerLawFit, d: float) -> float:
    """ε(d) = A · d^(−ρ).

    Raises:
        InvalidParameterError: d 非正。
    """
    if not d > 0:
        raise InvalidParameterError(f"d 必须为正: {d}")
    return fit.A * d ** (-fit.rho)


def invert_error(fit: PowerLawFit, epsilon: float) -> float:
    """反解达到误差 ε 所需的 d = (A/ε)^(1/ρ).

    Raises:
        InvalidParameterError: ε 不在 (0, 1) 内。
        NoSolutionError: ρ ≤ 0。
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"ε 必须在 (0, 1) 内: {epsilon}")
    if fit.rho <= 0:
        raise NoSolutionError(f"ρ={fit.rho} 不为正，误差不随 d 下降")
    return (fit.A / epsilon) ** (1.0 / fit.rho)


def theoretical_complexity_exponent(rho: float) -> float:
    """复杂度主项 ∝ d²，而 d ∝ ε^(−1/ρ)，因此复杂度 ∝ ε^(−2/ρ)."""
    if rho <= 0:
        raise NoSolutionError(f"ρ={rho} 不为正")
    return 2.0 / rho


def log_log_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """ln y 对 ln x 的最小二乘斜率."""
    if len(x) != len(y) or len(x) < 2:
        raise FitError("对数斜率至少需要2个成对的点")
    if any(v <= 0 or not math.isfinite(v) for v in (*x, *y)):
        raise FitError("对数斜率要求所有值为正")
    lx = np.log(np.asarray(x, dtype=np.float64))
    if np.unique(lx).size < 2:
        raise FitError("自变量全部相同，无法拟合斜率")
    slope, _ = np.polyfit(lx, np.log(np.asarray(y, dtype=np.float64)), 1)
    return float(slope)
