#!/usr/bin/env python
"""随仓库分发的参考数据读取模块.

config/reference/ 下的 CSV 是参考结果的原始数据表，作为复现对比的依据。
误差表统一为 d,d2,epsilon,std,role 五列：role 为 single（单独训练）、
bracket（分数 d2 两侧的整数 d2 训练结果）或 composite（由两侧结果插值得到的点）。
"""

import logging
from pathlib import Path

import pandas as pd

from scaling.power_law import ScalingPoint
from utils.errors import DatasetNotFoundError, TableFormatError
from utils.settings import REFERENCE_DIR

logger = logging.getLogger(__name__)

SINGLE = "single"
BRACKET = "bracket"
COMPOSITE = "composite"
ERROR_COLUMNS = ["d", "d2", "epsilon", "std", "role"]


def load_reference(name: str, directory: Path = REFERENCE_DIR) -> pd.DataFrame:
    """读取 <name>.csv.

    Raises:
        DatasetNotFoundError: 文件不存在。
    """
    path = Path(directory) / f"{name}.csv"
    if not path.exists():
        raise DatasetNotFoundError(f"缺少参考数据: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    logger.debug("读取参考数据 %s: %s 行", name, len(frame))
    return frame


def load_error_table(name: str, directory: Path = REFERENCE_DIR) -> pd.DataFrame:
    """读取误差表并检查列."""
    frame = load_reference(name, directory)
    if list(frame.columns) != ERROR_COLUMNS:
        raise TableFormatError(f"{name} 的列应为 {ERROR_COLUMNS}，实际为 {list(frame.columns)}")
    return frame


def error_points(name: str, directory: Path = REFERENCE_DIR) -> list[ScalingPoint]:
    """拟合用的数据点：单独训练的点与插值合成的点，不含两侧的整数 d2 点."""
    frame = load_error_table(name, directory)
    rows = frame[frame["role"].isin([SINGLE, COMPOSITE])]
    return [ScalingPoint(float(r.d), float(r.epsilon), float(r.std)) for r in rows.itertuples(index=False)]


def bracket_points(name: str, d: int, directory: Path = REFERENCE_DIR) -> tuple[ScalingPoint, ScalingPoint]:
    """某个 d1 的两侧整数 d2 结果，ScalingPoint.d 为 d2."""
    frame = load_error_table(name, directory)
    rows = frame[(frame["role"] == BRACKET) & (frame["d"] == d)].sort_values("d2")
    if len(rows) != 2:
        raise TableFormatError(f"{name} 中 d={d} 应有两行 bracket 数据，实际为 {len(rows)}")
    lo, hi = (ScalingPoint(float(r.d2), float(r.epsilon), float(r.std)) for r in rows.itertuples(index=False))
    return lo, hi
