#!/usr/bin/env python
"""结构描述序列化模块.

格式为 JSON（键排序、缩进2），字段见 docs/formats.md，format_version 为1。
"""

import json
from pathlib import Path
from typing import Any

from arch.arch_spec import ArchFamily, ArchSpec, LayerSpec
from utils.errors import InvalidArchitectureError

FORMAT_VERSION = 1


def spec_to_dict(spec: ArchSpec) -> dict[str, Any]:
    """把结构描述转为可序列化字典."""
    return {
        "format_version": FORMAT_VERSION,
        "family": spec.family.value,
        "d": spec.d,
        "constant": spec.constant,
        "filters": list(spec.filters),
        "input_shape": list(spec.input_shape),
        "layers": [
            {
                "kind": layer.kind,
                "label": layer.label,
                "in_size": layer.in_size,
                "out_size": layer.out_size,
                "kernel": layer.kernel,
                "padding": layer.padding,
            }
            for layer in spec.layers
        ],
    }


def spec_from_dict(data: dict[str, Any]) -> ArchSpec:
    """从字典恢复结构描述.

    Raises:
        InvalidArchitectureError: 版本不符或字段缺失。
    """
    if data.get("format_version") != FORMAT_VERSION:
        raise InvalidArchitectureError(f"不支持的结构描述版本: {data.get('format_version')}")
    try:
        spec = ArchSpec(
            family=ArchFamily(data["family"]),
            d=int(data["d"]),
            constant=float(data["constant"]),
            filters=tuple(int(f) for f in data["filters"]),
            layers=tuple(LayerSpec(**layer) for layer in data["layers"]),
            input_shape=tuple(int(s) for s in data["input_shape"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidArchitectureError(f"结构描述字段错误: {e}") from e
    spec.shapes()
    return spec


def dumps_spec(spec: ArchSpec) -> str:
    """序列化为 JSON 文本."""
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=True, ensure_ascii=False)


def loads_spec(text: str) -> ArchSpec:
    """从 JSON 文本恢复."""
    try:
        return spec_from_dict(json.loads(text))
    except json.JSONDecodeError as e:
        raise InvalidArchitectureError(f"结构描述不是合法JSON: {e}") from e


def save_spec(spec: ArchSpec, path: Path) -> None:
    """写入文件."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_spec(spec) + "\n", encoding="utf-8")


def load_spec(path: Path) -> ArchSpec:
    """从文件读取."""
    return loads_spec(Path(path).read_text(encoding="utf-8"))
