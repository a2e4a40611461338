#!/usr/bin/env python

"""
浅层卷积网络标度实验命令行程序.

生成满足守恒律的 LeNet / VGG-16 结构，统计 MAdd，拟合并外推误差幂律，
在 CIFAR-10 上训练，并对照参考数据重新生成结果表。

退出码：0 成功，1 用法错误，2 结构非法，3 训练失败，4 数据缺失。
"""

# 标准库导入
import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

# 第三方库导入
import numpy as np
import pandas as pd

# 本地模块导入
from arch import ArchFamily, build_arch, conservation_report, load_spec, save_spec
from arch.arch_spec import ArchSpec
from cnn import build_network, gradient_check
from cnn.gradient_check import DEFAULT_SAMPLES
from cnn.tensor_core import child_seed, make_rng
from complexity import CountMode, madds
from reproduce import build_tables, dataset_names, error_points
from reproduce.tables import complexity_polynomials, max_deviation, table_choices
from scaling import ScalingPoint, complexity_at_error, extrapolate_error, fit_power_law, invert_error
from storage import CsvStorage, load_cifar10
from storage.cifar10 import CIFAR_COUNTS
from storage.tables import frame_to_csv
from training import TrainConfig, load_experiment, preset, train
from utils.errors import (
    CorruptRecordError,
    DatasetNotFoundError,
    GradientCheckError,
    InvalidArchitectureError,
    ShallowScalingError,
    TrainingDivergedError,
)
from utils.logger import configure_basic_logging, get_logger
from utils.settings import OUTPUT_DIR

# 配置日志记录
logger = get_logger(__name__, "shallow_scaling.log", level=logging.INFO)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ARCH = 2
EXIT_TRAINING = 3
EXIT_DATA = 4

DATASET_HINT = (
    "请从 https://www.cs.toronto.edu/~kriz/cifar.html 下载 CIFAR-10 binary version，"
    "解压后通过 --data 或 .env 中的 CIFAR10_ROOT 指定目录。"
)


class UsageError(Exception):
    """命令行参数错误."""


class ArgumentParser(argparse.ArgumentParser):
    """参数错误时以退出码1结束."""

    def error(self, message: str) -> None:
        """打印用法并退出."""
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: 错误: {message}\n")


def _add_arch_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("family", nargs=None if required else "?", choices=[f.value for f in ArchFamily], help="结构族")
    parser.add_argument("--d", "--d1", dest="d", type=int, help="LeNet 的 d1 或 VGG-16 的 d")
    parser.add_argument("--ratio", "--constant", dest="constant", type=float, help="LeNet 的 d2/d1 或 VGG-16 的增长常数")
    parser.add_argument("--d2", type=int, help="仅 LeNet：直接指定 d2")


def _arch_from_args(args: argparse.Namespace) -> ArchSpec:
    if args.family is None:
        raise UsageError("需要结构族或 --spec")
    if args.d is None:
        raise UsageError("需要 --d / --d1")
    return build_arch(args.family, args.d, args.constant, args.d2)


def _require_file(path: Path | None, flag: str) -> None:
    if path is not None and not path.is_file():
        raise UsageError(f"{flag} 指定的文件不存在: {path}")


def cmd_arch(args: argparse.Namespace) -> int:
    """生成结构描述文件并打印守恒律审计."""
    spec = _arch_from_args(args)
    output = args.output or OUTPUT_DIR / f"{spec.label}.json"
    report = conservation_report(spec)
    save_spec(spec, output)
    print(f"结构: {spec.label}  滤波器: {', '.join(str(f) for f in spec.filters)}")
    for i, (block, dev) in enumerate(zip(report.blocks, report.relative_deviations(), strict=True), start=1):
        print(f"  块{i}: depth={block.depth:<6} m={block.extent:<3} depth·m={block.product:<8} 相对均值 {dev:+.2%}")
    print(f"守恒偏差: {report.deviation:.2%}")
    print(f"已写入 {output}")
    return EXIT_OK


def cmd_madds(args: argparse.Namespace) -> int:
    """打印逐层与总 MAdd."""
    _require_file(args.spec, "--spec")
    spec = load_spec(args.spec) if args.spec else _arch_from_args(args)
    report = madds(spec, args.mode)
    rows = report.nonzero() if not args.all_layers else list(report.layers)
    frame = pd.DataFrame([{"index": c.index, "label": c.label, "madds": c.madds} for c in rows])
    sys.stdout.write(frame_to_csv(frame))
    print(f"total,{report.total}")
    return EXIT_OK


def _points_from_args(args: argparse.Namespace) -> list[ScalingPoint]:
    if args.input is not None:
        _require_file(args.input, "--input")
        frame = pd.read_csv(args.input, float_precision="round_trip")
        if not {"d", "epsilon"} <= set(frame.columns):
            raise UsageError(f"{args.input} 需要 d 与 epsilon 两列")
        stds = frame["std"] if "std" in frame.columns else [None] * len(frame)
        return [ScalingPoint(float(d), float(e), None if s is None or pd.isna(s) else float(s))
                for d, e, s in zip(frame["d"], frame["epsilon"], stds, strict=True)]
    return error_points(args.dataset)


def cmd_fit(args: argparse.Namespace) -> int:
    """拟合 ε = A / d^ρ."""
    fit = fit_power_law(_points_from_args(args), weighted=args.weighted)
    print(f"A={fit.A:.6g} rho={fit.rho:.6g} residual={fit.residual:.3e} n={fit.n_points}")
    return EXIT_OK


def cmd_extrapolate(args: argparse.Namespace) -> int:
    """按拟合外推 ε(d)，或反解达到 ε 所需的 d 与复杂度."""
    fit = fit_power_law(_points_from_args(args), weighted=args.weighted)
    rows = [{"d": d, "epsilon": extrapolate_error(fit, d)} for d in args.at_d or []]
    poly = complexity_polynomials().get(ArchFamily(args.family)) if args.family else None
    for eps in args.at_epsilon or []:
        row = {"d": invert_error(fit, eps), "epsilon": eps}
        if poly is not None:
            row["madds"] = complexity_at_error(fit, poly, eps)
        rows.append(row)
    if not rows:
        raise UsageError("需要 --at-d 或 --at-epsilon")
    sys.stdout.write(frame_to_csv(pd.DataFrame(rows)))
    return EXIT_OK


def cmd_reproduce_tables(args: argparse.Namespace) -> int:
    """重新生成复现表并写出 CSV."""
    storage = CsvStorage(args.output_dir)
    for name, table in build_tables(args.which).items():
        storage.save_table(name, table)
        print(f"{name}: {len(table)} 行, 最大相对偏差 {max_deviation(table):.4f} -> {storage.data_dir / f'{name}.csv'}")
    return EXIT_OK


def _train_config(args: argparse.Namespace, spec: ArchSpec | None) -> tuple[TrainConfig, ArchSpec]:
    arch = None
    if args.config is not None:
        config, arch = load_experiment(args.config)
    if spec is None:
        if arch is None:
            raise UsageError("需要 --spec，或在配置文件中提供 arch")
        spec = build_arch(arch["family"], arch["d"], arch.get("constant"), arch.get("d2"))
    if args.config is None:
        config = preset(spec.family, spec.d, args.preset)
    if args.epochs is not None:
        config = config.truncated(args.epochs)
    if args.deterministic:
        config = replace(config, deterministic=True)
    if args.no_augment:
        config = replace(config, augment=False)
    if args.holdout:
        config = replace(config, validation_holdout=True)
    return config, spec


def cmd_train(args: argparse.Namespace) -> int:
    """多种子训练，写出逐 epoch 记录、汇总与检查点."""
    _require_file(args.spec, "--spec")
    _require_file(args.config, "--config")
    if args.seeds < 1 or args.workers < 1:
        raise UsageError("--seeds 与 --workers 必须为正")
    spec = load_spec(args.spec) if args.spec else None
    config, spec = _train_config(args, spec)

    train_data, test_data = load_cifar10(args.data, expected_counts=None if args.allow_partial else CIFAR_COUNTS)
    seeds = [config.seed + i for i in range(args.seeds)]
    result = train(spec, config, train_data, test_data, seeds, workers=args.workers,
                   checkpoint_precision=args.precision)

    storage = CsvStorage(args.output_dir)
    storage.save(result.traces, result.summary())
    for seed, data in result.checkpoints.items():
        storage.save_checkpoint(f"{spec.label}-seed{seed}", data)
    std = "无" if result.std is None else f"{result.std:.4f}"
    print(f"{spec.label}: ε = {result.mean:.4f} ± {std} ({len(seeds)} 个种子) -> {storage.data_dir}")
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    """在随机小批量上做有限差分梯度检查."""
    spec = _arch_from_args(args)
    rng = make_rng(child_seed(args.seed, 0))
    network = build_network(spec, rng)
    inputs = rng.uniform(-1.0, 1.0, size=(args.batch, *spec.input_shape))
    labels = np.arange(args.batch) % 10
    report = gradient_check(network, inputs, labels, tolerance=args.tolerance, samples=args.samples,
                            seed=args.seed, raise_on_failure=False)
    for check in report.parameters:
        print(f"{check.name:<20} 检查 {check.checked:<4} 跳过 {check.skipped:<4} 最大相对误差 {check.worst_error:.3e}")
    if not report.passed:
        worst = max(report.parameters, key=lambda c: c.worst_error)
        raise GradientCheckError(worst.name, worst.worst_index, worst.worst_error, args.tolerance)
    print(f"梯度检查通过 (容差 {args.tolerance:g})")
    return EXIT_OK


def build_parser() -> ArgumentParser:
    """构建命令行解析器."""
    parser = ArgumentParser(prog="shallow-scaling", description="浅层卷积网络的守恒律结构、复杂度与误差幂律实验")
    parser.add_argument("--verbose", "-v", action="store_true", help="输出调试日志")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("arch", help="生成结构描述并审计守恒律")
    _add_arch_args(p)
    p.add_argument("--output", type=Path, help="结构描述输出路径（JSON）")
    p.set_defaults(handler=cmd_arch)

    p = sub.add_parser("madds", help="统计每输入的乘加次数")
    _add_arch_args(p, required=False)
    p.add_argument("--spec", type=Path, help="结构描述文件，替代族参数")
    p.add_argument("--mode", choices=[m.value for m in CountMode], default=CountMode.FORWARD.value)
    p.add_argument("--all-layers", action="store_true", help="列出计数为0的层")
    p.set_defaults(handler=cmd_madds)

    for name, handler, text in (("fit", cmd_fit, "拟合误差幂律"), ("extrapolate", cmd_extrapolate, "外推误差或反解 d")):
        p = sub.add_parser(name, help=text)
        source = p.add_mutually_exclusive_group()
        source.add_argument("--dataset", default="lenet_error", choices=dataset_names(), help="参考误差表")
        source.add_argument("--input", type=Path, help="CSV 文件，列 d,epsilon[,std]")
        p.add_argument("--weighted", action="store_true", help="按 ε/std 加权")
        if name == "extrapolate":
            p.add_argument("--at-d", type=float, nargs="+", help="外推的 d")
            p.add_argument("--at-epsilon", type=float, nargs="+", help="反解的目标误差")
            p.add_argument("--family", choices=[ArchFamily.LENET.value, ArchFamily.VGG16.value], help="同时给出该族的 MAdd")
        p.set_defaults(handler=handler)

    p = sub.add_parser("reproduce-tables", help="重新生成复现表")
    p.add_argument("which", choices=table_choices(), help="表名，fig3a/fig3b/fig3c 各展开为一组表")
    p.add_argument("--output-dir", type=Path, default=OUTPUT_DIR / "tables")
    p.set_defaults(handler=cmd_reproduce_tables)

    p = sub.add_parser("train", help="在 CIFAR-10 上训练")
    p.add_argument("--spec", type=Path, help="结构描述文件")
    p.add_argument("--config", type=Path, help="实验配置文件（JSON）")
    p.add_argument("--preset", default="main", help="没有配置文件时使用的超参数表")
    p.add_argument("--seeds", type=int, default=1, help="种子个数，从配置中的 seed 起连续取值")
    p.add_argument("--epochs", type=int, help="截短训练的 epoch 数")
    p.add_argument("--deterministic", action="store_true", help="逐位可复现模式")
    p.add_argument("--no-augment", action="store_true", help="关闭数据增强")
    p.add_argument("--holdout", action="store_true", help="按类别留出 10000 张训练图像作验证集")
    p.add_argument("--workers", type=int, default=1, help="并行进程数")
    p.add_argument("--precision", type=int, choices=[32, 64], default=32, help="检查点精度")
    p.add_argument("--data", type=Path, help="CIFAR-10 目录，缺省读取 CIFAR10_ROOT")
    p.add_argument("--allow-partial", action="store_true", help="不检查 50000/10000 的样本数（用于小规模数据）")
    p.add_argument("--output-dir", type=Path, default=OUTPUT_DIR / "runs")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("gradcheck", help="有限差分梯度检查")
    _add_arch_args(p)
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="每个参数张量抽查的元素数")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_gradcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    """命令行入口，返回退出码."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_basic_logging(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.handler(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: 错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidArchitectureError as e:
        logger.error("结构非法: %s", e)
        return EXIT_ARCH
    except (TrainingDivergedError, GradientCheckError) as e:
        logger.error("训练失败: %s", e)
        return EXIT_TRAINING
    except (DatasetNotFoundError, CorruptRecordError) as e:
        logger.error("数据缺失: %s", e)
        print(DATASET_HINT, file=sys.stderr)
        return EXIT_DATA
    except ShallowScalingError as e:
        logger.error("%s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:  # pylint: disable=broad-except
        # 主程序入口点需要捕获所有异常以确保错误被记录
        logger.critical("程序运行出错: %s", e)
        raise  # 重新抛出异常，允许程序以非零状态退出
