"""取值表上的基本运算：按边缘分布积掉某个坐标、规范投影"""

import numpy as np


def expect_axis(table: np.ndarray, axis: int, weights: np.ndarray) -> np.ndarray:
    """对 table 的第 axis 个坐标按 weights 求期望，返回少一维的表"""
    moved = np.moveaxis(table, axis, -1)
    return (moved * weights).sum(axis=-1)


def center_axis(table: np.ndarray, axis: int, weights: np.ndarray) -> np.ndarray:
    """(I - E_axis) table"""
    return table - np.expand_dims(expect_axis(table, axis, weights), axis)


def canonical_projection(table: np.ndarray, weights: list[np.ndarray]) -> np.ndarray:
    """∏_k (I - E_k) 作用于核的取值表，结果对每个坐标都条件中心化

    Args:
        table: 轴顺序与 weights 对应的取值表
        weights: 每个坐标的边缘概率

    Returns:
        np.ndarray: 规范（退化）核
    """
    out = np.asarray(table)
    for axis, w in enumerate(weights):
        out = center_axis(out, axis, w)
    return out
