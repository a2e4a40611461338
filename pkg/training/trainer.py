#!/usr/bin/env python
"""训练与评估模块.

每个种子独立训练一个网络：He 初始化、按 lr_at 计划的 Nesterov SGD、
按类别均衡的 mini-batch 与逐图像增强，每个 epoch 结束后在测试集上评估。
初始化、batch 顺序和增强各用一条由种子派生的独立随机数流；
非确定模式下再混入一次性熵（记录在日志中）。
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
import pandas as pd

from arch.arch_spec import ArchSpec
from cnn.network import Network, build_network
from cnn.tensor_core import Tensor, child_seed, make_rng
from storage.checkpoint import CheckpointMeta, save_checkpoint
from storage.cifar10 import Dataset
from training.augment import augment_batch
from training.batches import stratified_batches, stratified_holdout
from training.config import TrainConfig, lr_at
from training.optimizer import NesterovSGD
from utils.errors import InvalidParameterError, TrainingDivergedError
from utils.logger import get_logger

logger = get_logger(__name__, "training.log", level=logging.INFO)

# 随机数流用途键
INIT_STREAM = 1
BATCH_STREAM = 2
AUGMENT_STREAM = 3
HOLDOUT_STREAM = 4

EVAL_CHUNK = 500
AGGREGATE_LABEL = "aggregate"


class Classifier(Protocol):
    """evaluate 只需要 predict."""

    def predict(self, inputs: Tensor) -> Tensor:
        """返回 [N, 10] 输出."""


@dataclass
class SeedResult:
    """单个种子的训练结果."""

    seed: int
    epsilon: float
    traces: list[dict[str, float]]
    checkpoint: bytes | None = None


@dataclass
class RunResult:
    """多种子训练结果.

    Attributes:
        errors: 种子 → 最后一个 epoch 的测试误差。
        mean: 平均误差。
        std: 样本标准差，少于2个种子时为None。
        traces: 逐 epoch 记录，列为 seed, epoch, train_loss, test_error（留出验证集时另有 validation_error）。
        checkpoints: 种子 → 最终检查点字节。
    """

    errors: dict[int, float]
    mean: float
    std: float | None
    traces: pd.DataFrame
    checkpoints: dict[int, bytes] = field(default_factory=dict)

    def summary(self) -> pd.DataFrame:
        """每个种子一行，最后附加一行汇总."""
        rows = [{"seed": str(seed), "epsilon": eps, "std": math.nan} for seed, eps in self.errors.items()]
        rows.append({"seed": AGGREGATE_LABEL, "epsilon": self.mean, "std": math.nan if self.std is None else self.std})
        return pd.DataFrame(rows, columns=["seed", "epsilon", "std"])


def evaluate(model: Classifier, dataset: Dataset, chunk: int = EVAL_CHUNK) -> float:
    """误分类比例，预测取10个输出中的最大者（并列取最小下标）."""
    if not len(dataset):
        raise InvalidParameterError("评估数据集为空")
    wrong = 0
    for start in range(0, len(dataset), chunk):
        images, labels = dataset.batch(np.arange(start, min(start + chunk, len(dataset))))
        wrong += int(np.count_nonzero(np.argmax(model.predict(images), axis=1) != labels))
    return wrong / len(dataset)


def aggregate_runs(values: Sequence[float]) -> tuple[float, float | None]:
    """样本均值与 (n−1) 标准差；只有一个值时标准差为None.

    Raises:
        InvalidParameterError: 输入为空。
    """
    if not len(values):
        raise InvalidParameterError("至少需要一个运行结果")
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size >= 2 else None
    return mean, std


def _run_epoch(network: Network, optimizer: NesterovSGD, data: Dataset, config: TrainConfig,
               seed: int, salt: tuple[int, ...], epoch: int, step: int) -> tuple[float, int]:
    """训练一个 epoch，返回 (平均训练损失, 累计步数)."""
    eta = lr_at(config, epoch)
    batch_seed = child_seed(seed, *salt, BATCH_STREAM, epoch)
    augment_rng = make_rng(child_seed(seed, *salt, AUGMENT_STREAM, epoch))
    losses = []
    for indices in stratified_batches(data.labels, batch_seed, config.batch_size):
        step += 1
        images, labels = data.batch(indices)
        if config.augment:
            images = augment_batch(images, augment_rng)
        loss = network.loss_and_gradients(images, labels)
        if not math.isfinite(loss):
            logger.error("种子 %s 在 epoch %s 第 %s 步发散", seed, epoch, step)
            raise TrainingDivergedError(seed, epoch, step)
        optimizer.step(eta)
        losses.append(loss)
    logger.debug("epoch %s: η=%.6g, 动量范数 %.4g", epoch, eta, optimizer.velocity_norm())
    return float(np.mean(losses)), step


def train_seed(spec: ArchSpec, config: TrainConfig, train_data: Dataset, test_data: Dataset,
               seed: int, checkpoint_precision: int | None = 32) -> SeedResult:
    """用一个种子完成全部 epoch.

    Args:
        spec: 结构描述。
        config: 训练配置。
        train_data: 训练集。
        test_data: 测试集。
        seed: 运行种子。
        checkpoint_precision: 检查点精度（32/64），None 表示不生成检查点。

    Returns:
        SeedResult: 最终误差与逐 epoch 记录。

    Raises:
        TrainingDivergedError: 损失出现NaN/Inf。
    """
    salt: tuple[int, ...] = ()
    if not config.deterministic:
        salt = (int(np.random.SeedSequence().entropy),)
        logger.info("种子 %s 使用非确定模式，附加熵 %s", seed, salt[0])

    validation = None
    if config.validation_holdout:
        keep, held = stratified_holdout(train_data.labels, child_seed(seed, *salt, HOLDOUT_STREAM))
        train_data, validation = train_data.subset(keep, "train"), train_data.subset(held, "validation")

    network = build_network(spec, make_rng(child_seed(seed, *salt, INIT_STREAM)))
    optimizer = NesterovSGD(network, config.mu, config.alpha, config.decay_biases)
    traces = []
    step = 0
    for epoch in range(1, config.epochs + 1):
        train_loss, step = _run_epoch(network, optimizer, train_data, config, seed, salt, epoch, step)
        row = {"seed": seed, "epoch": epoch, "train_loss": train_loss, "test_error": evaluate(network, test_data)}
        if validation is not None:
            row["validation_error"] = evaluate(network, validation)
        traces.append(row)
        logger.info("[%s seed=%s] epoch %s/%s 训练损失 %.4f 测试误差 %.4f",
                    spec.label, seed, epoch, config.epochs, train_loss, row["test_error"])

    checkpoint = None
    if checkpoint_precision is not None:
        checkpoint = save_checkpoint(network, CheckpointMeta(seed=seed, epoch=config.epochs, precision=checkpoint_precision))
    return SeedResult(seed, traces[-1]["test_error"], traces, checkpoint)


def train(spec: ArchSpec, config: TrainConfig, train_data: Dataset, test_data: Dataset,
          seeds: Sequence[int] | None = None, workers: int = 1, checkpoint_precision: int | None = 32) -> RunResult:
    """多种子训练并汇总.

    Args:
        spec: 结构描述。
        config: 训练配置。
        train_data: 训练集（已预处理的数据集对象）。
        test_data: 测试集。
        seeds: 种子列表，缺省为 [config.seed]。
        workers: 并行进程数，种子之间相互独立。
        checkpoint_precision: 检查点精度，None 表示不生成。

    Returns:
        RunResult: 每个种子的误差、均值、标准差与逐 epoch 记录。
    """
    seeds = [config.seed] if seeds is None else list(seeds)
    if not seeds:
        raise InvalidParameterError("至少需要一个种子")
    logger.info("开始训练 %s: %s 个种子, %s 个 epoch, 进程数 %s", spec.label, len(seeds), config.epochs, workers)

    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
            futures = [pool.submit(train_seed, spec, config, train_data, test_data, s, checkpoint_precision) for s in seeds]
            results = [f.result() for f in futures]
    else:
        results = [train_seed(spec, config, train_data, test_data, s, checkpoint_precision) for s in seeds]

    mean, std = aggregate_runs([r.epsilon for r in results])
    traces = pd.DataFrame([row for r in results for row in r.traces])
    checkpoints = {r.seed: r.checkpoint for r in results if r.checkpoint is not None}
    logger.info("训练完成 %s: 平均误差 %.4f, 标准差 %s", spec.label, mean, "无" if std is None else f"{std:.4f}")
    return RunResult({r.seed: r.epsilon for r in results}, mean, std, traces, checkpoints)
