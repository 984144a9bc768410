"""标量：有理模式用 Fraction，实数模式用 float

同一个规格只使用一种模式，不混用。有理模式下的恒等式用 == 判断，
实数模式下统一用 EPS_NUM 容差。
"""

from fractions import Fraction
from typing import Iterable, Literal, Union

import numpy as np

Scalar = Union[Fraction, float]
Mode = Literal["rational", "real"]

MODES: tuple[str, ...] = ("rational", "real")
EPS_NUM = 1e-10


def parse_scalar(raw, mode: Mode) -> Scalar:
    """把 JSON 中的数值（"num/den" 字符串、十进制字符串或数字）转换为标量

    Args:
        raw: 原始值
        mode: "rational" 或 "real"

    Returns:
        Scalar: Fraction 或 float

    Raises:
        ValueError: 无法解析
    """
    if isinstance(raw, bool):
        raise ValueError(f"布尔值不能作为数值: {raw!r}")
    if isinstance(raw, Fraction):
        value = raw
    elif isinstance(raw, int):
        value = Fraction(raw)
    elif isinstance(raw, float):
        if mode == "real":
            return float(raw)
        value = Fraction(str(raw))
    elif isinstance(raw, str):
        text = raw.strip()
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            if mode == "real":
                return float(text)
            raise ValueError(f"无法解析有理数: {raw!r}") from e
    else:
        raise ValueError(f"不支持的数值类型: {type(raw).__name__}")
    return value if mode == "rational" else float(value)


def coerce(value, mode: Mode) -> Scalar:
    """把内部计算得到的数值转换到给定模式"""
    if mode == "rational":
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        raise TypeError(f"有理模式不接受 {type(value).__name__}: {value!r}")
    return float(value)


def zero(mode: Mode) -> Scalar:
    return Fraction(0) if mode == "rational" else 0.0


def one(mode: Mode) -> Scalar:
    return Fraction(1) if mode == "rational" else 1.0


def is_zero(value, mode: Mode, eps: float = EPS_NUM) -> bool:
    if mode == "rational":
        return value == 0
    return abs(float(value)) <= eps


def is_nonnegative(value, mode: Mode, eps: float = EPS_NUM) -> bool:
    if mode == "rational":
        return value >= 0
    return float(value) >= -eps


def to_float(value) -> float:
    return float(value)


def group_key(value, mode: Mode, quantum: float = 1e-12):
    """条件期望分组用的键：有理模式取精确值，实数模式按 quantum 量化"""
    if mode == "rational":
        return value
    return round(float(value) / quantum) * quantum


def as_array(values: Iterable, mode: Mode) -> np.ndarray:
    """按模式创建一维数组：有理模式为 object 数组，实数模式为 float64"""
    values = list(values)
    if mode == "rational":
        out = np.empty(len(values), dtype=object)
        out[:] = [coerce(v, mode) for v in values]
        return out
    return np.asarray([float(v) for v in values], dtype=np.float64)


def array_dtype(mode: Mode):
    return object if mode == "rational" else np.float64


def zeros(shape, mode: Mode) -> np.ndarray:
    if mode == "rational":
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=np.float64)


def full(shape, value, mode: Mode) -> np.ndarray:
    if mode == "rational":
        out = np.empty(shape, dtype=object)
        out.fill(coerce(value, mode))
        return out
    return np.full(shape, float(value), dtype=np.float64)
