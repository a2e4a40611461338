#!/usr/bin/env python
"""CSV文件存储实现模块.

该模块实现了使用CSV文件格式存储和加载训练结果与复现表的功能。
"""

import logging
from pathlib import Path

import pandas as pd

from storage.base import SUMMARY_COLUMNS, TRACE_COLUMNS, Storage
from storage.tables import frame_to_csv

logger = logging.getLogger(__name__)


class CsvStorage(Storage):
    """CSV文件存储实现类.

    所有文件写入同一个输出目录：results.csv（逐 epoch 记录）、summary.csv（最终误差）、
    <name>.csv（表格）与 checkpoints/<name>.ckpt。
    """

    def __init__(self, data_dir: str | Path = "./output") -> None:
        """初始化CSV存储对象.

        Args:
            data_dir: 输出目录路径，默认为"./output"。
        """
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.traces_file = self.data_dir / "results.csv"
        self.summary_file = self.data_dir / "summary.csv"
        self.checkpoint_dir = self.data_dir / "checkpoints"

    def load(self) -> tuple[pd.DataFrame, pd.DataFrame]:
        """加载结果文件，文件不存在或无法解析时返回空DataFrame.

        Returns:
            tuple: (逐 epoch 记录, 汇总)。
        """
        traces = self._load_csv(self.traces_file, TRACE_COLUMNS, "逐epoch记录")
        summary = self._load_csv(self.summary_file, SUMMARY_COLUMNS, "汇总")
        return traces, summary

    def _load_csv(self, file_path: Path, columns: list[str], data_name: str) -> pd.DataFrame:
        """从CSV文件加载数据.

        Args:
            file_path: CSV文件路径。
            columns: 数据列名列表。
            data_name: 数据名称，用于日志记录。

        Returns:
            pd.DataFrame: 加载的数据，如果加载失败则返回空DataFrame。
        """
        if file_path.exists():
            try:
                data = pd.read_csv(file_path, float_precision="round_trip")
                logger.info("已加载%s，共%s条记录", data_name, len(data))
                return data
            except pd.errors.ParserError as e:
                logger.error("解析%s出错: %s", data_name, e)
            except OSError as e:
                logger.error("读取%s文件出错: %s", data_name, e)
        return pd.DataFrame(columns=columns)

    def _write(self, path: Path, text: str | bytes) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            if isinstance(text, bytes):
                path.write_bytes(text)
            else:
                path.write_text(text, encoding="utf-8", newline="")
            logger.debug("已写入 %s", path)
        except OSError as e:
            logger.error("写入 %s 时文件操作错误: %s", path, e)
            raise

    def save(self, traces: pd.DataFrame, summary: pd.DataFrame) -> None:
        """保存逐 epoch 记录与汇总.

        Args:
            traces: 逐 epoch 记录，固定列在前，其余列（如 validation_error）附在后面。
            summary: 汇总。
        """
        extra = [c for c in traces.columns if c not in TRACE_COLUMNS]
        self._write(self.traces_file, frame_to_csv(traces[TRACE_COLUMNS + extra]))
        self._write(self.summary_file, frame_to_csv(summary[SUMMARY_COLUMNS]))

    def save_table(self, name: str, table: pd.DataFrame) -> None:
        """保存表格为 <name>.csv."""
        self._write(self.data_dir / f"{name}.csv", frame_to_csv(table))

    def save_checkpoint(self, name: str, data: bytes) -> None:
        """保存检查点为 checkpoints/<name>.ckpt."""
        self._write(self.checkpoint_dir / f"{name}.ckpt", data)
