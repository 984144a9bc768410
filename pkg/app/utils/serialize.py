"""报告序列化：有理数输出精确字符串，实数输出 15 位有效数字"""

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np


def format_scalar(value) -> Optional[str]:
    """Fraction → "num/den"（整数不带分母），其余 → 15 位有效数字"""
    if value is None:
        return None
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format_decimal(value)


def format_decimal(value) -> Optional[str]:
    if value is None:
        return None
    number = float(value)
    if number == 0.0:
        # 去掉 -0
        number = 0.0
    return f"{number:.15g}"


def scalar_fields(name: str, value) -> dict[str, Optional[str]]:
    """汇总量同时给出十进制与精确形式（有精确值时）"""
    fields = {name: format_decimal(value)}
    if isinstance(value, Fraction):
        fields[f"{name}_exact"] = str(value)
    return fields


def table_to_json(table: np.ndarray) -> Any:
    """取值表转嵌套列表，0 维表直接返回标量字符串"""
    array = np.asarray(table, dtype=object)
    if array.ndim == 0:
        return format_scalar(array[()])
    return [table_to_json(row) for row in array]


def dumps(document: Any) -> str:
    return json.dumps(document, ensure_ascii=False, indent=2) + "\n"


def write_output(text: str, path: Optional[str] = None) -> None:
    """写到文件，未指定路径时写 stdout"""
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
