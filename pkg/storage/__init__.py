#!/usr/bin/env python

"""
数据存储模块.

CIFAR-10 加载与预处理、检查点、CSV 表格以及训练结果存储。
"""

from storage.base import Storage
from storage.checkpoint import CheckpointMeta, load_checkpoint, save_checkpoint
from storage.cifar10 import Dataset, load_cifar10, preprocess
from storage.csv_storage import CsvStorage
from storage.tables import emit_table, parse_table

__all__ = [
    "Storage",
    "CsvStorage",
    "CheckpointMeta",
    "save_checkpoint",
    "load_checkpoint",
    "Dataset",
    "load_cifar10",
    "preprocess",
    "emit_table",
    "parse_table",
]
