#!/usr/bin/env python
"""CSV 表格输出模块.

输出带表头的 CSV，小数点为 '.'，浮点数按最短可往返表示写出，与区域设置无关。
"""

import io
from collections.abc import Sequence
from typing import Any

import pandas as pd

from utils.errors import TableFormatError


def emit_table(rows: Sequence[Sequence[Any]], columns: Sequence[str]) -> str:
    """把行数据写成 CSV 文本.

    Args:
        rows: 每行长度必须等于列数。
        columns: 列名。

    Returns:
        str: CSV 文本，首行为表头。

    Raises:
        TableFormatError: 行长度不一致。
    """
    for i, row in enumerate(rows):
        if len(row) != len(columns):
            raise TableFormatError(f"第 {i} 行有 {len(row)} 个值，表头有 {len(columns)} 列")
    return frame_to_csv(pd.DataFrame([list(row) for row in rows], columns=list(columns)))


def frame_to_csv(frame: pd.DataFrame) -> str:
    """DataFrame 转 CSV 文本（不含索引）."""
    return frame.to_csv(index=False, lineterminator="\n")


def parse_table(text: str) -> pd.DataFrame:
    """解析 emit_table 的输出."""
    return pd.read_csv(io.StringIO(text), float_precision="round_trip")
