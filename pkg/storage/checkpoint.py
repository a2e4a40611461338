#!/usr/bin/env python
"""网络检查点序列化模块.

字节布局（小端）：

    magic       4 字节  b"SSCK"
    version     uint16  格式版本，当前为1
    precision   uint8   每个元素的字节数：4（float32）或 8（float64）
    reserved    uint8   0
    header_len  uint32  头部 JSON 的字节数
    header      UTF-8 JSON（键排序）：结构描述、批归一化参数、种子、epoch、块列表
    blocks      每块为 uint64 元素数 + 对应数量的小端浮点数

块的顺序与 Network.state_blocks() 一致：每层先参数后缓冲区。
"""

import json
import struct
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from arch.serialization import spec_from_dict, spec_to_dict
from cnn.batchnorm import DEFAULT_EPSILON, DEFAULT_MOMENTUM, BatchNormLayer
from cnn.network import Network, build_network
from cnn.tensor_core import DTYPE, make_rng
from utils.errors import CorruptCheckpointError, InvalidArchitectureError, InvalidParameterError

MAGIC = b"SSCK"
VERSION = 1
PREAMBLE = struct.Struct("<4sHBBI")
COUNT = struct.Struct("<Q")
PRECISIONS = {4: np.dtype("<f4"), 8: np.dtype("<f8")}


@dataclass
class CheckpointMeta:
    """检查点元数据.

    Attributes:
        seed: 运行种子。
        epoch: 已完成的 epoch 数。
        precision: 存储精度（32 或 64 位）。
        extra: 其他可 JSON 序列化的信息。
    """

    seed: int = 0
    epoch: int = 0
    precision: int = 32
    extra: dict[str, Any] = field(default_factory=dict)


def _bn_settings(network: Network) -> tuple[float, float]:
    for layer in network.layers:
        if isinstance(layer, BatchNormLayer):
            return layer.epsilon, layer.momentum
    return DEFAULT_EPSILON, DEFAULT_MOMENTUM


def save_checkpoint(network: Network, meta: CheckpointMeta) -> bytes:
    """把网络权重与元数据编码为字节.

    Args:
        network: 网络。
        meta: 元数据，precision 为 32 或 64。

    Returns:
        bytes: 检查点内容。
    """
    if meta.precision not in (32, 64):
        raise InvalidParameterError(f"存储精度只能是32或64: {meta.precision}")
    dtype = PRECISIONS[meta.precision // 8]
    blocks = network.state_blocks()
    epsilon, momentum = _bn_settings(network)
    header = {
        "arch": spec_to_dict(network.spec),
        "bn_epsilon": epsilon,
        "bn_momentum": momentum,
        "seed": meta.seed,
        "epoch": meta.epoch,
        "precision": meta.precision,
        "extra": meta.extra,
        "blocks": [{"name": name, "shape": list(tensor.shape)} for name, tensor in blocks],
    }
    header_bytes = json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8")
    parts = [PREAMBLE.pack(MAGIC, VERSION, dtype.itemsize, 0, len(header_bytes)), header_bytes]
    for _, tensor in blocks:
        parts.append(COUNT.pack(tensor.size))
        parts.append(np.ascontiguousarray(tensor, dtype=dtype).tobytes())
    return b"".join(parts)


def load_checkpoint(data: bytes) -> tuple[Network, CheckpointMeta]:
    """从字节恢复网络与元数据.

    Raises:
        CorruptCheckpointError: magic、版本、块数量或长度不符。
    """
    if len(data) < PREAMBLE.size:
        raise CorruptCheckpointError("检查点长度不足")
    magic, version, itemsize, _, header_len = PREAMBLE.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptCheckpointError(f"magic 不符: {magic!r}")
    if version != VERSION:
        raise CorruptCheckpointError(f"不支持的检查点版本: {version}")
    if itemsize not in PRECISIONS:
        raise CorruptCheckpointError(f"未知存储精度: {itemsize} 字节")
    offset = PREAMBLE.size
    try:
        header = json.loads(data[offset:offset + header_len].decode("utf-8"))
        if not isinstance(header, dict):
            raise CorruptCheckpointError(f"检查点头部不是 JSON 对象: {type(header).__name__}")
        spec = spec_from_dict(header["arch"])
        network = build_network(spec, make_rng(0), header["bn_epsilon"], header["bn_momentum"])
        meta = CheckpointMeta(seed=int(header["seed"]), epoch=int(header["epoch"]), precision=int(header["precision"]),
                              extra=dict(header.get("extra", {})))
        declared = list(header.get("blocks", []))
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError, InvalidArchitectureError) as e:
        raise CorruptCheckpointError(f"检查点头部损坏: {e}") from e
    offset += header_len

    targets = network.state_blocks()
    if len(declared) != len(targets):
        raise CorruptCheckpointError(f"块数量 {len(declared)} 与结构所需 {len(targets)} 不符")
    dtype = PRECISIONS[itemsize]
    for entry, (name, tensor) in zip(declared, targets, strict=True):
        if not isinstance(entry, dict) or entry.get("name") != name or tuple(entry.get("shape", ())) != tensor.shape:
            raise CorruptCheckpointError(f"块描述 {entry!r} 与 {name}{tensor.shape} 不符")
        if offset + COUNT.size > len(data):
            raise CorruptCheckpointError(f"块 {name} 缺失")
        (count,) = COUNT.unpack_from(data, offset)
        offset += COUNT.size
        end = offset + count * itemsize
        if count != tensor.size or end > len(data):
            raise CorruptCheckpointError(f"块 {name} 长度错误")
        block = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
        if not np.all(np.isfinite(block)):
            raise CorruptCheckpointError(f"块 {name} 含有 NaN/Inf")
        tensor[...] = block.reshape(tensor.shape).astype(DTYPE)
        offset = end
    if offset != len(data):
        raise CorruptCheckpointError(f"检查点末尾有 {len(data) - offset} 字节多余数据")

    return network, meta
