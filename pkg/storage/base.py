#!/usr/bin/env python
"""结果存储基类模块.

定义了训练结果存储的基类接口，所有具体的存储实现都应该继承此类。
"""

import logging

import pandas as pd

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["seed", "epoch", "train_loss", "test_error"]
SUMMARY_COLUMNS = ["seed", "epsilon", "std"]


class Storage:
    """结果存储基类.

    定义了结果存储的基本接口，所有具体的存储实现都应该继承此类。
    """

    def load(self) -> tuple[pd.DataFrame, pd.DataFrame]:
        """加载已保存的结果.

        Returns:
            tuple: (逐 epoch 记录, 每个种子的最终误差汇总)。

        Raises:
            NotImplementedError: 该方法需要被子类实现。
        """
        raise NotImplementedError

    def save(self, traces: pd.DataFrame, summary: pd.DataFrame) -> None:
        """保存结果.

        Args:
            traces: 逐 epoch 记录，列为 seed, epoch, train_loss, test_error。
            summary: 每个种子的最终误差及汇总行，列为 seed, epsilon, std。

        Raises:
            NotImplementedError: 该方法需要被子类实现。
        """
        raise NotImplementedError

    def save_table(self, name: str, table: pd.DataFrame) -> None:
        """保存任意表格（例如复现表）.

        Raises:
            NotImplementedError: 该方法需要被子类实现。
        """
        raise NotImplementedError

    def save_checkpoint(self, name: str, data: bytes) -> None:
        """保存检查点字节.

        Raises:
            NotImplementedError: 该方法需要被子类实现。
        """
        raise NotImplementedError
