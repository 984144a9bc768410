"""JSON 规格文档的读写

文档格式:
    {"n": 2, "p": 2, "mode": "rational",
     "variables": [{"atoms": [{"v": "-1", "prob": "1/2"}, {"v": "1", "prob": "1/2"}]}, ...],
     "kernels": {"type": "homogeneous", "coeffs": [{"subset": [1, 2], "a": "1"}]},
     "symmetric": true}

子集在文档中是 1 起始的升序列表。
"""

import json
from dataclasses import replace
from pathlib import Path
from typing import Any, Union

from app.model.builders import build_homogeneous_sum, build_symmetric_sum, build_table_spec
from app.model.distributions import NAMED_LAWS, SAMPLERS, Distribution, FiniteDistribution, SamplerDistribution
from app.model.kernels import ProductKernel
from app.model.scalar import MODES, Mode, parse_scalar
from app.model.spec import UStatisticSpec
from app.model.validation import validate_spec
from app.utils.errors import SpecError
from app.utils.logger import logger
from app.utils.serialize import format_scalar, table_to_json


def _parse_variable(raw: Any, mode: Mode) -> Distribution:
    if not isinstance(raw, dict):
        raise SpecError(f"变量描述必须是对象: {raw!r}")
    if "sampler" in raw:
        name = raw["sampler"]
        if name not in SAMPLERS:
            raise SpecError(f"未知的采样器 '{name}'，可选 {sorted(SAMPLERS)}")
        return SamplerDistribution(name)
    if "law" in raw:
        name = raw["law"]
        if name not in NAMED_LAWS:
            raise SpecError(f"未知的分布 '{name}'，可选 {sorted(NAMED_LAWS)}")
        return NAMED_LAWS[name](mode)
    atoms = raw.get("atoms")
    if not isinstance(atoms, list):
        raise SpecError("变量缺少 atoms 列表")
    try:
        return FiniteDistribution.from_atoms([(a["v"], a["prob"]) for a in atoms], mode, raw.get("name"))
    except (KeyError, TypeError) as e:
        raise SpecError(f"原子格式错误: {e}") from e
    except ValueError as e:
        raise SpecError(str(e)) from e


def _parse_variables(raw: Any, n: int, mode: Mode) -> tuple:
    if isinstance(raw, dict) and "iid" in raw:
        law = _parse_variable(raw["iid"], mode)
        return tuple([law] * n)
    if not isinstance(raw, list):
        raise SpecError("variables 必须是列表或 {\"iid\": ...}")
    return tuple(_parse_variable(item, mode) for item in raw)


def _parse_subset(raw: Any, n: int) -> tuple[int, ...]:
    if not isinstance(raw, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in raw):
        raise SpecError(f"子集必须是整数列表: {raw!r}")
    if any(j < 1 or j > n for j in raw):
        raise SpecError(f"子集 {raw} 超出 [1, {n}]")
    if raw != sorted(set(raw)):
        raise SpecError(f"子集 {raw} 必须严格升序")
    return tuple(j - 1 for j in raw)


def spec_from_document(doc: dict) -> UStatisticSpec:
    """由已解析的 JSON 对象构造规格并做结构检查

    Raises:
        SpecError: 文档格式错误或存在结构违规
    """
    if not isinstance(doc, dict):
        raise SpecError("规格文档必须是 JSON 对象")
    try:
        n = int(doc["n"])
        p = int(doc["p"])
        kernels = doc["kernels"]
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError(f"规格缺少必要字段: {e}") from e
    mode = doc.get("mode", "rational")
    if mode not in MODES:
        raise SpecError(f"未知模式 '{mode}'")
    if p > n:
        raise SpecError(f"OrderExceedsN: p={p} 大于 n={n}")
    variables = _parse_variables(doc.get("variables"), n, mode)
    if len(variables) != n:
        raise SpecError(f"VariableCountMismatch: 变量个数 {len(variables)} 与 n={n} 不一致")
    symmetric = doc.get("symmetric")
    name = doc.get("name")

    kind = kernels.get("type") if isinstance(kernels, dict) else None
    try:
        if kind == "homogeneous":
            coeffs = {_parse_subset(c["subset"], n): parse_scalar(c["a"], mode) for c in kernels["coeffs"]}
            spec = build_homogeneous_sum(coeffs, variables, mode, symmetric, name)
        elif kind == "table":
            tables = {_parse_subset(e["subset"], n): e["table"] for e in kernels["entries"]}
            spec = build_table_spec(
                tables, variables, bool(kernels.get("canonicalize", False)), bool(symmetric), mode, name
            )
        elif kind == "symmetric":
            spec = build_symmetric_sum(n, p, variables[0], kernels["coefficient"], mode, name)
        else:
            raise SpecError(f"未知的核类型: {kind!r}")
    except (KeyError, TypeError) as e:
        raise SpecError(f"核描述格式错误: {e}") from e
    except SpecError:
        raise
    except ValueError as e:
        raise SpecError(str(e)) from e

    if spec.p != p:
        raise SpecError(f"KernelOrderMismatch: 核的阶数 {spec.p} 与声明的 p={p} 不一致")
    if doc.get("rho2") is not None:
        spec = replace(spec, rho2=parse_scalar(doc["rho2"], mode))
    violations = validate_spec(spec)
    if violations:
        for violation in violations:
            logger.error(f"规格违规 {violation}")
        raise SpecError("; ".join(str(v) for v in violations))
    return spec


def load_spec(source: Union[str, Path, dict]) -> UStatisticSpec:
    """从路径或已解析对象读取规格

    Args:
        source: JSON 文件路径或对象

    Returns:
        UStatisticSpec: 通过结构检查的规格

    Raises:
        SpecError: 无法读取、无法解析或结构不合法
    """
    if isinstance(source, dict):
        return spec_from_document(source)
    path = Path(source)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SpecError(f"无法读取规格文件 {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecError(f"规格文件 {path} 不是合法 JSON: {e}") from e
    spec = spec_from_document(doc)
    if spec.name is None:
        spec = replace(spec, name=path.stem)
    logger.info(f"成功加载规格 {spec.label()}: n={spec.n}, p={spec.p}, 模式={spec.mode}")
    return spec


def _dump_variable(variable: Distribution) -> dict:
    if not variable.has_support:
        return {"sampler": variable.name}
    return {"atoms": [{"v": format_scalar(v), "prob": format_scalar(p)} for v, p in variable.atoms]}


def dump_spec(spec: UStatisticSpec) -> dict:
    """规格转回 JSON 文档"""
    family = spec.kernels
    if family.uniform is not None:
        kernels = {"type": "symmetric", "coefficient": format_scalar(family.uniform)}
    elif family.is_product:
        kernels = {
            "type": "homogeneous",
            "coeffs": [
                {"subset": [j + 1 for j in subset], "a": format_scalar(kernel.coefficient)}
                for subset, kernel in sorted(family.entries.items())
            ],
        }
    else:
        entries = []
        for subset, kernel in sorted(family.entries.items()):
            if isinstance(kernel, ProductKernel):
                table = kernel.table([spec.variables[j].values_array() for j in subset], spec.mode)
            else:
                table = kernel.values
            entries.append({"subset": [j + 1 for j in subset], "table": table_to_json(table)})
        kernels = {"type": "table", "entries": entries}
    doc = {
        "n": spec.n,
        "p": spec.p,
        "mode": spec.mode,
        "variables": [_dump_variable(v) for v in spec.variables],
        "kernels": kernels,
        "symmetric": spec.symmetric,
    }
    if spec.name:
        doc["name"] = spec.name
    if spec.rho2 is not None:
        doc["rho2"] = format_scalar(spec.rho2)
    return doc
