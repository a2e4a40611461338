#!/usr/bin/env python
"""复现表生成模块.

每张表都从基本计算（MAdd 计数、幂律拟合、外推）重新得到，
并与参考数据并排列出，附 relative_deviation = |computed − published| / |published|。
complexity_curve 没有参考列，是供作图用的双对数曲线。
"""

import logging
from collections.abc import Callable

import numpy as np
import pandas as pd

from arch.arch_spec import ArchFamily
from arch.builders import build_arch
from complexity.madds import GIGA, madds
from complexity.quad_fit import QuadFit, quad_fit
from reproduce.reference import bracket_points, error_points, load_reference
from scaling.complexity_curve import complexity_at_error, complexity_curve, complexity_error_exponent, complexity_ratio
from scaling.interpolation import interpolate_fractional_d2
from scaling.power_law import PowerLawFit, extrapolate_error, fit_power_law, theoretical_complexity_exponent
from utils.errors import InvalidParameterError

logger = logging.getLogger(__name__)

# 复杂度多项式使用的 d 取值
MADD_GRID = {
    ArchFamily.LENET: (6, 19, 44, 86, 164),
    ArchFamily.VGG16: (4, 8, 16, 32, 64),
}
# 主误差表
MAIN_DATASETS = {ArchFamily.LENET: "lenet_error", ArchFamily.VGG16: "vgg16_error"}
EXPONENT_POINTS = 3
# 复杂度曲线的 ε 网格
CURVE_EPSILONS = np.geomspace(0.2, 0.005, 25)


def _with_deviation(frame: pd.DataFrame, computed: str = "computed", published: str = "published") -> pd.DataFrame:
    frame["relative_deviation"] = (frame[computed] - frame[published]).abs() / frame[published].abs()
    return frame


def complexity_polynomials() -> dict[ArchFamily, QuadFit]:
    """按 MAdd 计数拟合的复杂度二次多项式."""
    return {
        family: quad_fit([(d, madds(build_arch(family, d)).total) for d in grid])
        for family, grid in MADD_GRID.items()
    }


def dataset_names() -> list[str]:
    """参与拟合的误差表名."""
    return [str(name) for name in load_reference("fits")["dataset"]]


def dataset_fits(weighted: bool = False) -> dict[str, PowerLawFit]:
    """六组误差数据的幂律拟合."""
    return {name: fit_power_law(error_points(name), weighted=weighted) for name in dataset_names()}


def madds_table() -> pd.DataFrame:
    """逐个结构的前向 MAdd 与参考值."""
    reference = load_reference("madds")
    rows = []
    for r in reference.itertuples(index=False):
        computed = madds(build_arch(r.family, int(r.d))).total
        rows.append({"family": r.family, "d": int(r.d), "computed": computed, "published": int(r.madds)})
    return _with_deviation(pd.DataFrame(rows))


def fits_table() -> pd.DataFrame:
    """六组数据的 A、ρ 与参考的近似 ρ."""
    reference = load_reference("fits")
    fits = dataset_fits()
    rows = []
    for r in reference.itertuples(index=False):
        fit = fits[r.dataset]
        rows.append({
            "dataset": r.dataset,
            "family": r.family,
            "constant": r.constant,
            "n_points": fit.n_points,
            "A": fit.A,
            "residual": fit.residual,
            "computed": fit.rho,
            "published": r.rho,
        })
    return _with_deviation(pd.DataFrame(rows))


def extrapolation_table() -> pd.DataFrame:
    """主误差表拟合在训练范围之外的外推."""
    fits = dataset_fits()
    rows = []
    for r in load_reference("extrapolation").itertuples(index=False):
        fit = fits[MAIN_DATASETS[ArchFamily(r.family)]]
        rows.append({"family": r.family, "d": int(r.d), "computed": extrapolate_error(fit, r.d), "published": r.epsilon})
    return _with_deviation(pd.DataFrame(rows))


def interpolation_table() -> pd.DataFrame:
    """分数 d2 的插值合成点与表中的合成值."""
    reference = load_reference(MAIN_DATASETS[ArchFamily.LENET])
    composites = reference[reference["role"] == "composite"]
    ratio = float(load_reference("fits").set_index("dataset").loc[MAIN_DATASETS[ArchFamily.LENET], "constant"])
    rows = []
    for r in composites.itertuples(index=False):
        lo, hi = bracket_points(MAIN_DATASETS[ArchFamily.LENET], int(r.d))
        point = interpolate_fractional_d2(int(r.d), ratio, lo, hi)
        rows.append({
            "d1": int(r.d),
            "d2": ratio * r.d,
            "computed": point.epsilon,
            "published": r.epsilon,
            "computed_std": point.std,
            "published_std": r.std,
        })
    return _with_deviation(pd.DataFrame(rows))


def complexity_table() -> pd.DataFrame:
    """达到给定误差所需的 GMAdd（LeNet 与 VGG-16）."""
    fits = dataset_fits()
    polys = complexity_polynomials()
    reference = load_reference("complexity_at_error")
    rows = []
    for r in reference.itertuples(index=False):
        for family, column in ((ArchFamily.LENET, "lenet_gmadds"), (ArchFamily.VGG16, "vgg16_gmadds")):
            computed = complexity_at_error(fits[MAIN_DATASETS[family]], polys[family], r.epsilon) / GIGA
            rows.append({"epsilon": r.epsilon, "family": str(family), "computed": computed,
                         "published": getattr(r, column)})
    return _with_deviation(pd.DataFrame(rows))


def ratio_table() -> pd.DataFrame:
    """同一误差下 LeNet 与 VGG-16 的复杂度之比."""
    fits = dataset_fits()
    polys = complexity_polynomials()
    lenet = (fits[MAIN_DATASETS[ArchFamily.LENET]], polys[ArchFamily.LENET])
    vgg = (fits[MAIN_DATASETS[ArchFamily.VGG16]], polys[ArchFamily.VGG16])
    rows = []
    for r in load_reference("complexity_ratio").itertuples(index=False):
        computed = complexity_ratio(*lenet, *vgg, r.epsilon)
        rows.append({"epsilon": r.epsilon, "computed": computed, "published": r.ratio})
    return _with_deviation(pd.DataFrame(rows))


def exponent_table() -> pd.DataFrame:
    """复杂度随 1/ε 增长的指数，取误差表最后三个 ε；theoretical 列为 2/ρ."""
    fits = dataset_fits()
    polys = complexity_polynomials()
    epsilons = load_reference("complexity_at_error")["epsilon"].to_numpy()[-EXPONENT_POINTS:]
    rows = []
    for r in load_reference("complexity_exponent").itertuples(index=False):
        family = ArchFamily(r.family)
        fit = fits[MAIN_DATASETS[family]]
        points = [(float(eps), complexity_at_error(fit, polys[family], eps)) for eps in epsilons]
        rows.append({"family": r.family, "theoretical": theoretical_complexity_exponent(fit.rho),
                     "computed": complexity_error_exponent(points), "published": r.exponent})
    return _with_deviation(pd.DataFrame(rows))


def complexity_curve_table(epsilons: np.ndarray = CURVE_EPSILONS) -> pd.DataFrame:
    """两种结构在一组 ε 上的所需 d 与复杂度，可直接用于双对数作图."""
    fits = dataset_fits()
    polys = complexity_polynomials()
    frames = []
    for family, dataset in MAIN_DATASETS.items():
        curve = complexity_curve(fits[dataset], polys[family], epsilons)
        curve.insert(0, "family", str(family))
        frames.append(curve)
    return pd.concat(frames, ignore_index=True)


TABLES: dict[str, Callable[[], pd.DataFrame]] = {
    "madds": madds_table,
    "complexity": complexity_table,
    "complexity_curve": complexity_curve_table,
    "ratio": ratio_table,
    "fits": fits_table,
    "extrapolation": extrapolation_table,
    "interpolation": interpolation_table,
    "exponents": exponent_table,
}
# 分组表名
TABLE_GROUPS: dict[str, tuple[str, ...]] = {
    "fig3a": ("madds",),
    "fig3b": ("complexity", "complexity_curve", "exponents"),
    "fig3c": ("ratio",),
}
ALL_TABLES = "all"


def table_choices() -> list[str]:
    """命令行可用的表名."""
    return [*TABLES, *TABLE_GROUPS, ALL_TABLES]


def build_tables(which: str) -> dict[str, pd.DataFrame]:
    """生成指定的复现表，"all" 表示全部，fig3a/fig3b/fig3c 展开为对应的一组表.

    Raises:
        InvalidParameterError: 未知表名。
    """
    if which == ALL_TABLES:
        names = list(TABLES)
    elif which in TABLE_GROUPS:
        names = list(TABLE_GROUPS[which])
    elif which in TABLES:
        names = [which]
    else:
        raise InvalidParameterError(f"未知的表: {which}，可选 {', '.join(table_choices())}")
    tables = {}
    for name in names:
        tables[name] = TABLES[name]()
        logger.info("复现表 %s: %s 行, 最大相对偏差 %.4f", name, len(tables[name]), max_deviation(tables[name]))
    return tables


def max_deviation(table: pd.DataFrame) -> float:
    """表中最大的 relative_deviation，没有对照列或为空时为 NaN."""
    if "relative_deviation" not in table or not len(table):
        return float("nan")
    return float(np.nanmax(table["relative_deviation"]))
