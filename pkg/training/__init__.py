#!/usr/bin/env python

"""
训练模块.

超参数预设与学习率计划、Nesterov SGD、均衡 mini-batch、数据增强以及多种子训练。
"""

from training.augment import augment, augment_batch, flip_horizontal, translate
from training.batches import stratified_batches, stratified_holdout
from training.config import Preset, Regime, TrainConfig, load_experiment, lr_at, preset, preset_entry, save_experiment
from training.optimizer import NesterovSGD, sgd_nesterov_step
from training.trainer import RunResult, aggregate_runs, evaluate, train, train_seed

__all__ = [
    "Regime",
    "TrainConfig",
    "Preset",
    "preset",
    "preset_entry",
    "lr_at",
    "load_experiment",
    "save_experiment",
    "sgd_nesterov_step",
    "NesterovSGD",
    "stratified_batches",
    "stratified_holdout",
    "augment",
    "augment_batch",
    "flip_horizontal",
    "translate",
    "train",
    "train_seed",
    "evaluate",
    "aggregate_runs",
    "RunResult",
]
