"""计算复杂度统计包.

统计结构的乘加运算数，并对复杂度随 d 的变化做二次拟合。
"""

from .madds import GIGA, CountMode, LayerCount, MAddReport, madds, parameter_count
from .quad_fit import QuadFit, quad_fit
