#!/usr/bin/env python
"""复杂度二次多项式拟合模块."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from utils.errors import FitError


@dataclass(frozen=True)
class QuadFit:
    """a·d² + b·d + c 的最小二乘拟合.

    Attributes:
        a, b, c: 系数。
        residual: 残差平方和。
        relative_residual: 拟合值相对原始值的最大相对偏差。
    """

    a: float
    b: float
    c: float
    residual: float
    relative_residual: float

    def __call__(self, d: float | np.ndarray) -> float | np.ndarray:
        """在 d 处求值."""
        return (self.a * d + self.b) * d + self.c

    @property
    def coefficients(self) -> tuple[float, float, float]:
        """(a, b, c)."""
        return (self.a, self.b, self.c)


def quad_fit(points: Sequence[tuple[float, float]]) -> QuadFit:
    """对 (d, MAdds) 点做最小二乘二次拟合.

    Args:
        points: 至少3个不同 d 的点。

    Returns:
        QuadFit: 拟合结果。

    Raises:
        FitError: 不同的 d 少于3个。
    """
    if len(points) < 3:
        raise FitError(f"二次拟合至少需要3个点，实际为 {len(points)}")
    d = np.asarray([p[0] for p in points], dtype=np.float64)
    y = np.asarray([p[1] for p in points], dtype=np.float64)
    if np.unique(d).size < 3:
        raise FitError("二次拟合至少需要3个不同的 d")
    a, b, c = np.polyfit(d, y, 2)
    fitted = np.polyval([a, b, c], d)
    residual = float(np.sum((fitted - y) ** 2))
    scale = np.where(y != 0, np.abs(y), 1.0)
    return QuadFit(float(a), float(b), float(c), residual, float(np.max(np.abs(fitted - y) / scale)))
