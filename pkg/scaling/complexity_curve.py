#!/usr/bin/env python
"""复杂度与误差的关系模块.

把误差幂律反解出的 d 代入复杂度二次多项式，得到达到给定误差所需的复杂度，
并据此计算复杂度随 1/ε 的指数和两种结构的复杂度比值。
"""

from collections.abc import Sequence

import numpy as np
import pandas as pd

from complexity.madds import GIGA
from complexity.quad_fit import QuadFit
from scaling.power_law import PowerLawFit, invert_error, log_log_slope
from utils.errors import FitError


def complexity_at_error(fit: PowerLawFit, poly: QuadFit, epsilon: float) -> float:
    """达到误差 ε 所需的每输入 MAdd.

    Args:
        fit: 误差幂律。
        poly: 复杂度二次多项式。
        epsilon: 目标误差，(0, 1)。

    Returns:
        float: MAdd 数。
    """
    return float(poly(invert_error(fit, epsilon)))


def complexity_error_exponent(points: Sequence[tuple[float, float]]) -> float:
    """ln(复杂度) 对 ln(1/ε) 的最小二乘斜率.

    Args:
        points: 至少3个 (ε, 复杂度) 点，取值为正。

    Raises:
        FitError: 点数不足或退化。
    """
    if len(points) < 3:
        raise FitError(f"复杂度指数至少需要3个点，实际为 {len(points)}")
    if any(eps <= 0 for eps, _ in points):
        raise FitError("ε 必须为正")
    return log_log_slope([1.0 / eps for eps, _ in points], [c for _, c in points])


def complexity_ratio(fit_a: PowerLawFit, poly_a: QuadFit, fit_b: PowerLawFit, poly_b: QuadFit, epsilon: float) -> float:
    """同一误差下结构 A 与结构 B 的复杂度之比."""
    return complexity_at_error(fit_a, poly_a, epsilon) / complexity_at_error(fit_b, poly_b, epsilon)


def complexity_curve(fit: PowerLawFit, poly: QuadFit, epsilons: Sequence[float]) -> pd.DataFrame:
    """在一组误差上列出所需 d 与复杂度，附带对数列便于作图.

    Returns:
        pd.DataFrame: 列 epsilon, d, madds, gmadds, log_inv_epsilon, log_gmadds。
    """
    rows = []
    for eps in epsilons:
        d = invert_error(fit, eps)
        total = float(poly(d))
        rows.append({"epsilon": eps, "d": d, "madds": total, "gmadds": total / GIGA})
    frame = pd.DataFrame(rows, columns=["epsilon", "d", "madds", "gmadds"])
    frame["log_inv_epsilon"] = np.log(1.0 / frame["epsilon"])
    frame["log_gmadds"] = np.log(frame["gmadds"])
    return frame
