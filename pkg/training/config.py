#!/usr/bin/env python
"""训练超参数与学习率衰减计划模块.

学习率计划由若干区间（regime）组成，每个区间内每 Δt 个 epoch 把学习率乘以 q，
衰减在区间之间连续累乘。第 10 个 epoch 结束时的衰减从第 11 个 epoch 起生效。
"""

import json
import logging
from dataclasses import asdict, dataclass, field, replace
from functools import cache
from pathlib import Path
from typing import Any

from arch.arch_spec import ArchFamily
from utils.errors import InvalidParameterError, NoPresetError, ScheduleError
from utils.settings import PRESETS_FILE

logger = logging.getLogger(__name__)

BATCH_SIZE = 100
MAX_SEED = 2**64 - 1
MAIN_VARIANT = "main"


@dataclass(frozen=True)
class Regime:
    """学习率衰减区间.

    Attributes:
        first_epoch: 区间第一个 epoch（从1开始）。
        last_epoch: 区间最后一个 epoch，None 表示直到训练结束。
        q: 衰减因子，(0, 1]。
        interval: 衰减间隔 Δt（epoch 数）。
    """

    first_epoch: int
    last_epoch: int | None
    q: float
    interval: int

    def __post_init__(self) -> None:
        """检查取值."""
        if self.first_epoch < 1:
            raise ScheduleError(f"区间起点必须不小于1: {self.first_epoch}")
        if self.last_epoch is not None and self.last_epoch < self.first_epoch:
            raise ScheduleError(f"区间 [{self.first_epoch}, {self.last_epoch}] 为空")
        if not 0.0 < self.q <= 1.0:
            raise ScheduleError(f"衰减因子必须在 (0, 1] 内: {self.q}")
        if self.interval < 1:
            raise ScheduleError(f"衰减间隔必须不小于1: {self.interval}")

    def end(self, epochs: int) -> int:
        """区间的实际最后一个 epoch."""
        return epochs if self.last_epoch is None else self.last_epoch


def constant_schedule() -> tuple[Regime, ...]:
    """不衰减的计划."""
    return (Regime(1, None, 1.0, 1),)


@dataclass(frozen=True)
class TrainConfig:
    """训练配置.

    Attributes:
        eta: 初始学习率 η。
        mu: 动量常数 μ，[0, 1)。
        alpha: L2 系数 α。
        epochs: epoch 数。
        batch_size: mini-batch 大小，需为10的倍数（每类等量）。
        schedule: 学习率衰减区间，按顺序无重叠地覆盖 [1, epochs]。
        seed: 基础种子。
        deterministic: 随机数流只由种子派生，同种子结果逐位一致；否则混入一次性熵。
        augment: 是否做随机翻转与平移。
        validation_holdout: 是否从训练集按类别留出 1000×10 张作为验证集。
        decay_biases: L2 是否也作用于偏置。
    """

    eta: float
    mu: float
    alpha: float
    epochs: int
    batch_size: int = BATCH_SIZE
    schedule: tuple[Regime, ...] = field(default_factory=constant_schedule)
    seed: int = 0
    deterministic: bool = False
    augment: bool = True
    validation_holdout: bool = False
    decay_biases: bool = False

    def __post_init__(self) -> None:
        """检查取值与计划覆盖."""
        if not self.eta > 0:
            raise InvalidParameterError(f"学习率必须为正: {self.eta}")
        if not 0.0 <= self.mu < 1.0:
            raise InvalidParameterError(f"动量常数必须在 [0, 1) 内: {self.mu}")
        if self.alpha < 0:
            raise InvalidParameterError(f"L2 系数不能为负: {self.alpha}")
        if self.epochs < 1:
            raise InvalidParameterError(f"epoch 数必须为正: {self.epochs}")
        if self.batch_size < 10 or self.batch_size % 10:
            raise InvalidParameterError(f"batch 大小必须是10的正整数倍: {self.batch_size}")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidParameterError(f"种子必须是64位无符号整数: {self.seed}")
        object.__setattr__(self, "schedule", tuple(self.schedule))
        _check_schedule(self.schedule, self.epochs)

    def truncated(self, epochs: int) -> "TrainConfig":
        """截短到前 epochs 个 epoch，丢弃之后的区间.

        学习率在保留的 epoch 上与原配置完全一致。
        """
        if not 1 <= epochs <= self.epochs:
            raise InvalidParameterError(f"截短后的 epoch 数必须在 [1, {self.epochs}] 内: {epochs}")
        kept = [r for r in self.schedule if r.first_epoch <= epochs]
        kept[-1] = replace(kept[-1], last_epoch=None)
        return replace(self, epochs=epochs, schedule=tuple(kept))

    def to_dict(self) -> dict[str, Any]:
        """转换为可 JSON 序列化的字典."""
        data = asdict(self)
        data["schedule"] = [asdict(r) for r in self.schedule]
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TrainConfig":
        """由字典创建，未知键被忽略并记录警告."""
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            logger.warning("忽略未知配置项: %s", ", ".join(unknown))
        values = {k: v for k, v in data.items() if k in known}
        if "schedule" in values:
            values["schedule"] = tuple(Regime(**r) for r in values["schedule"])
        try:
            return cls(**values)
        except TypeError as e:
            raise InvalidParameterError(f"训练配置缺少字段: {e}") from e


def _check_schedule(schedule: tuple[Regime, ...], epochs: int) -> None:
    if not schedule:
        raise ScheduleError("学习率计划至少需要一个区间")
    expected = 1
    for i, regime in enumerate(schedule):
        if regime.first_epoch != expected:
            raise ScheduleError(f"第{i + 1}个区间应从 epoch {expected} 开始，实际为 {regime.first_epoch}")
        if regime.last_epoch is None:
            if i != len(schedule) - 1:
                raise ScheduleError("只有最后一个区间可以不指定终点")
            return
        expected = regime.last_epoch + 1
    if expected - 1 != epochs:
        raise ScheduleError(f"学习率计划覆盖到 epoch {expected - 1}，训练共 {epochs} 个 epoch")


def lr_at(config: TrainConfig, epoch: int) -> float:
    """第 epoch 个 epoch（从1开始）使用的学习率.

    每个区间贡献 floor(区间内已完成的 epoch 数 / Δt) 次衰减，各区间的衰减依次累乘。

    Raises:
        ScheduleError: epoch 越界。
    """
    if not 1 <= epoch <= config.epochs:
        raise ScheduleError(f"epoch {epoch} 超出 [1, {config.epochs}]")
    eta = config.eta
    for regime in config.schedule:
        length = regime.end(config.epochs) - regime.first_epoch + 1
        completed = min(max(epoch - regime.first_epoch, 0), length)
        eta *= regime.q ** (completed // regime.interval)
    return eta


@dataclass(frozen=True)
class Preset:
    """超参数表中的一行.

    Attributes:
        family: 结构族。
        d: d1 或 d。
        variant: 表名，例如 main、ratio_4_3、growth_1_5。
        constant: 该表对应的 LeNet 比例或 VGG 增长常数。
        d2: LeNet 实际训练的 d2 取值（分数 d2 时为两个相邻整数）。
        config: 训练配置。
    """

    family: ArchFamily
    d: int
    variant: str
    constant: float
    d2: tuple[int, ...]
    config: TrainConfig


@cache
def _load_presets(path: Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def preset_entry(family: ArchFamily | str, d: int, variant: str = MAIN_VARIANT, path: Path = PRESETS_FILE) -> Preset:
    """查找超参数表中的一行.

    Args:
        family: 结构族。
        d: d1 或 d。
        variant: 表名。
        path: 预设文件。

    Raises:
        NoPresetError: 表中没有该组合。
    """
    family = ArchFamily(family)
    presets = _load_presets(Path(path))
    table = presets.get(str(family), {}).get(variant)
    if table is None or str(d) not in table["entries"]:
        raise NoPresetError(f"没有 {family} d={d} {variant} 的预设，请提供完整的训练配置")
    entry = dict(table["entries"][str(d)])
    schedule = tuple(Regime(**r) for r in presets["schedules"][entry.pop("schedule")])
    d2 = tuple(entry.pop("d2", ()))
    config = TrainConfig(schedule=schedule, **entry)
    return Preset(family, d, variant, table["constant"], d2, config)


def preset(family: ArchFamily | str, d: int, variant: str = MAIN_VARIANT) -> TrainConfig:
    """返回超参数表中的训练配置."""
    return preset_entry(family, d, variant).config


def list_presets(path: Path = PRESETS_FILE) -> list[tuple[str, str, int]]:
    """列出全部 (族, 表名, d)."""
    presets = _load_presets(Path(path))
    return [
        (family, variant, int(d))
        for family, tables in presets.items() if family != "schedules"
        for variant, table in tables.items()
        for d in table["entries"]
    ]


def load_experiment(path: Path | str) -> tuple[TrainConfig, dict[str, Any] | None]:
    """读取实验配置文件：TrainConfig 字段加可选的 arch 对象.

    Returns:
        tuple: (训练配置, arch 参数字典或None)。
    """
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    arch = data.pop("arch", None)
    return TrainConfig.from_dict(data), arch


def save_experiment(config: TrainConfig, path: Path | str, arch: dict[str, Any] | None = None) -> None:
    """写出实验配置文件."""
    data = config.to_dict()
    if arch is not None:
        data["arch"] = arch
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)

