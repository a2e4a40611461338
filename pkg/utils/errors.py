#!/usr/bin/env python
"""异常定义模块.

项目内所有可预期的错误都继承自 ShallowScalingError，同时继承最接近的内置异常，
调用方既可以按项目异常捕获，也可以按 ValueError / OSError 等捕获。
"""


class ShallowScalingError(Exception):
    """项目异常基类."""


class InvalidShapeError(ShallowScalingError, ValueError):
    """张量形状不合法或不匹配."""


class InvalidParameterError(ShallowScalingError, ValueError):
    """参数取值不合法."""


class InvalidBatchError(ShallowScalingError, ValueError):
    """批大小不满足要求（例如训练模式下的批归一化）."""


class InvalidLabelError(ShallowScalingError, ValueError):
    """类别标签越界."""


class GradientCheckError(ShallowScalingError, AssertionError):
    """梯度检查失败.

    Attributes:
        layer: 出错参数所在层的标签。
        index: 参数在该张量中的扁平索引。
        relative_error: 相对误差。
    """

    def __init__(self, layer: str, index: int, relative_error: float, tolerance: float) -> None:
        """初始化梯度检查异常.

        Args:
            layer: 出错参数所在层的标签。
            index: 参数的扁平索引。
            relative_error: 实测相对误差。
            tolerance: 允许的相对误差。
        """
        super().__init__(f"梯度检查失败: {layer}[{index}] 相对误差 {relative_error:.3e} > {tolerance:.1e}")
        self.layer = layer
        self.index = index
        self.relative_error = relative_error
        self.tolerance = tolerance


class InvalidArchitectureError(ShallowScalingError, ValueError):
    """网络结构参数无法构成合法结构."""


class FitError(ShallowScalingError, ValueError):
    """拟合数据不足或退化."""


class NoSolutionError(ShallowScalingError, ValueError):
    """反解无解（例如幂律指数不为正）."""


class InterpolationRangeError(ShallowScalingError, ValueError):
    """插值目标超出区间."""


class NoPresetError(ShallowScalingError, KeyError):
    """没有对应的超参数预设."""

    def __str__(self) -> str:
        """返回可读信息（KeyError默认会加引号）."""
        return str(self.args[0]) if self.args else ""


class ScheduleError(ShallowScalingError, ValueError):
    """学习率衰减计划不合法或epoch越界."""


class StratificationError(ShallowScalingError, ValueError):
    """无法按类别均衡地划分mini-batch."""


class TrainingDivergedError(ShallowScalingError, RuntimeError):
    """训练发散（损失出现NaN/Inf）.

    Attributes:
        seed: 发散的运行种子。
        epoch: 发散时的epoch（从1开始）。
        step: 发散时的全局步数（从1开始）。
    """

    def __init__(self, seed: int, epoch: int, step: int) -> None:
        """初始化训练发散异常.

        Args:
            seed: 运行种子。
            epoch: epoch编号。
            step: 全局步数。
        """
        super().__init__(f"训练发散: seed={seed} epoch={epoch} step={step}")
        self.seed = seed
        self.epoch = epoch
        self.step = step


class DatasetNotFoundError(ShallowScalingError, FileNotFoundError):
    """数据集文件缺失."""


class CorruptRecordError(ShallowScalingError, OSError):
    """数据文件损坏或截断.

    Attributes:
        offset: 出错位置的字节偏移。
    """

    def __init__(self, message: str, offset: int) -> None:
        """初始化数据损坏异常.

        Args:
            message: 错误描述。
            offset: 字节偏移。
        """
        super().__init__(f"{message} (字节偏移 {offset})")
        self.offset = offset


class CorruptCheckpointError(ShallowScalingError, ValueError):
    """检查点格式错误."""


class TableFormatError(ShallowScalingError, ValueError):
    """表格数据不规整."""
