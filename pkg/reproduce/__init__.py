#!/usr/bin/env python

"""
复现表模块.

从基本计算重新生成 MAdd、拟合、外推与复杂度比值表，并与随仓库分发的参考数据对比。
"""

from reproduce.reference import error_points, load_reference
from reproduce.tables import TABLES, build_tables, complexity_polynomials, dataset_fits, dataset_names

__all__ = [
    "TABLES",
    "build_tables",
    "complexity_polynomials",
    "dataset_fits",
    "dataset_names",
    "error_points",
    "load_reference",
]
