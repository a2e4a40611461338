"""误差幂律标度包.

拟合、外推与反解 ε = A/d^ρ，推导复杂度与误差的关系，以及分数 d 的对数插值。
"""

from .complexity_curve import complexity_at_error, complexity_curve, complexity_error_exponent, complexity_ratio
from .interpolation import interpolate_fractional_d2, log_interpolate
from .power_law import (
    PowerLawFit,
    ScalingPoint,
    extrapolate_error,
    fit_power_law,
    invert_error,
    log_log_slope,
    theoretical_complexity_exponent,
)
