"""W 的精确分布：按取值分组与线性情形的卷积"""

from typing import Optional

import numpy as np

from app.distances.law import DiscreteLaw, discrete_law
from app.engine.outcome_space import OutcomeSpace, check_outcome_budget
from app.manager.settings_manager import settings_manager
from app.model.scalar import Mode, group_key, zero, zeros
from app.model.spec import UStatisticSpec
from app.utils.errors import SpecError, UnsupportedVariable
from app.utils.logger import logger


def group_by_value(table: np.ndarray, mode: Mode, quantum: Optional[float] = None) -> tuple[list, np.ndarray]:
    """按 W 的取值分组

    有理模式按精确值分组；实数模式先按 quantum 量化再分组。

    Returns:
        tuple[list, np.ndarray]: (每组的代表值, 与 table 同形状的组编号)
    """
    table = np.asarray(table)
    if mode == "rational":
        index: dict = {}
        flat = np.empty(table.size, dtype=np.int64)
        for position, value in enumerate(table.ravel()):
            flat[position] = index.setdefault(value, len(index))
        return list(index), flat.reshape(table.shape)
    quantum = settings_manager.real_key_quantum if quantum is None else quantum
    scaled = np.round(table.astype(np.float64) / quantum)
    unique, inverse = np.unique(scaled, return_inverse=True)
    return (unique * quantum).tolist(), inverse.reshape(table.shape)


def group_sums(values: np.ndarray, groups: np.ndarray, count: int, mode: Mode) -> np.ndarray:
    """每组内 values 的和（values 可广播到 groups 的形状）"""
    out = zeros(count, mode)
    np.add.at(out, groups.ravel(), np.broadcast_to(values, groups.shape).ravel())
    return out


def exact_law(space: OutcomeSpace, table: np.ndarray) -> DiscreteLaw:
    """W 的分布：相同取值的结果合并

    Args:
        space: 结果空间
        table: W 的全表

    Returns:
        DiscreteLaw: 有理模式下带精确原子
    """
    keys, groups = group_by_value(table, space.mode)
    probs = group_sums(space.joint_weights(), groups, len(keys), space.mode)
    law = discrete_law(keys, list(probs))
    logger.debug(f"精确分布: {law.size} 个原子")
    return law


def linear_law(spec: UStatisticSpec) -> DiscreteLaw:
    """p = 1 乘积核 W = Σ a_i X_i 的分布，逐个变量卷积，不枚举乘积空间

    Raises:
        SpecError: 不是一阶乘积核
        UnsupportedVariable: 存在只能采样的变量
        SpaceTooLarge: 卷积过程中的原子数超过上限
    """
    if spec.p != 1 or not spec.kernels.is_product:
        raise SpecError("linear_law 只适用于一阶乘积核")
    if not spec.is_finite:
        raise UnsupportedVariable("linear_law 需要有限支撑变量")
    mode = spec.mode
    dist = {zero(mode): zero(mode) + 1}
    for (i,), a in spec.kernels.coefficients(spec.n).items():
        step: dict = {}
        for v, pv in dist.items():
            for x, px in spec.variables[i].atoms:
                key = group_key(v + a * x, mode, settings_manager.real_key_quantum)
                step[key] = step.get(key, zero(mode)) + pv * px
        check_outcome_budget(len(step), "卷积支撑")
        dist = step
    return discrete_law(list(dist), list(dist.values()))
