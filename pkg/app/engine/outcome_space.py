"""有限乘积空间的穷举

取值表约定：n 个变量的函数用形状为 (|E_1|, ..., |E_n|) 的数组表示，第 i 个轴对应 X_i，
数组的多维下标就是混合进制的结果编号。有理模式下是 object 数组（元素为 Fraction），
实数模式下是 float64。
"""

from dataclasses import dataclass
from math import prod
from typing import Callable, Optional, Sequence, Union

import numpy as np

from app.manager.settings_manager import settings_manager
from app.model.kernels import outer_product
from app.model.scalar import Mode, Scalar, coerce, zero
from app.model.spec import UStatisticSpec
from app.model.tables import expect_axis
from app.utils.errors import SpaceTooLarge, SubsetBudgetExceeded, UnsupportedVariable
from app.utils.logger import logger

TableFunction = Union[np.ndarray, Callable[..., np.ndarray]]


def check_outcome_budget(
    count: int, what: str = "结果空间", limit: Optional[int] = None, env: str = "DEJONG_MAX_OUTCOMES"
) -> None:
    """超过枚举上限时抛出 SpaceTooLarge

    Args:
        count: 需要物化的取值个数
        what: 日志中的描述
        limit: 上限，缺省取设置 engine.max_outcomes
        env: 错误信息中提示的环境变量
    """
    limit = settings_manager.max_outcomes if limit is None else limit
    if count > limit:
        logger.error(f"{what}大小 {count} 超过上限 {limit}")
        raise SpaceTooLarge(f"{what}大小 {count} 超过上限 {limit}（可用 {env} 调整）")
    if count > limit // 2:
        logger.warning(f"{what}大小 {count} 接近上限 {limit}")


def check_subset_budget(n: int) -> None:
    limit = settings_manager.max_subset_bits
    if n > limit:
        logger.error(f"变量个数 {n} 超过子集位掩码上限 {limit}")
        raise SubsetBudgetExceeded(f"n={n} 超过子集位掩码上限 {limit}")


@dataclass(frozen=True, eq=False)
class OutcomeSpace:
    """∏ E_i 上的加权穷举，权重是边缘概率之积（不显式展开）

    Attributes:
        supports: 每个变量的取值数组
        weights: 每个变量的概率数组
        mode: "rational" 或 "real"
    """

    supports: tuple
    weights: tuple
    mode: Mode = "rational"

    @classmethod
    def from_spec(cls, spec: UStatisticSpec) -> "OutcomeSpace":
        """由规格构造结果空间

        Raises:
            UnsupportedVariable: 存在只能采样的变量
            SpaceTooLarge: 结果个数超过上限
        """
        missing = [i + 1 for i, v in enumerate(spec.variables) if not v.has_support]
        if missing:
            logger.error(f"变量 {missing} 没有有限支撑，无法精确计算")
            raise UnsupportedVariable(f"变量 {missing} 只能采样，精确计算需要有限支撑")
        return cls.from_marginals(spec.supports(), spec.weights(), spec.mode)

    @classmethod
    def from_marginals(cls, supports: Sequence[np.ndarray], weights: Sequence[np.ndarray], mode: Mode):
        check_outcome_budget(prod(len(s) for s in supports))
        return cls(tuple(supports), tuple(weights), mode)

    @property
    def n(self) -> int:
        return len(self.supports)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.supports)

    @property
    def size(self) -> int:
        return prod(self.shape)

    def coordinate(self, i: int) -> np.ndarray:
        """X_i 的取值，形状可与全表广播（除第 i 轴外都是 1）"""
        shape = [1] * self.n
        shape[i] = len(self.supports[i])
        return self.supports[i].reshape(shape)

    def joint_weights(self) -> np.ndarray:
        """每个结果的概率，全表形状"""
        return outer_product(list(self.weights), self.mode)

    def index(self, outcome: Sequence[int]) -> int:
        """下标元组 → 混合进制编号"""
        return int(np.ravel_multi_index(tuple(outcome), self.shape))

    def outcome(self, index: int) -> tuple[int, ...]:
        return tuple(int(k) for k in np.unravel_index(index, self.shape))

    def evaluate(self, f: TableFunction) -> np.ndarray:
        """把函数或取值表统一成全表

        f 可以是全表，也可以是接受 n 个可广播坐标数组的函数。
        """
        table = f(*[self.coordinate(i) for i in range(self.n)]) if callable(f) else f
        table = np.asarray(table)
        if table.shape != self.shape:
            table = np.broadcast_to(table, self.shape)
        return table

    def expectation(self, f: TableFunction) -> Scalar:
        """Σ_x P(x) f(x)，有理模式下精确"""
        table = self.evaluate(f)
        if self.n == 0:
            return coerce(table[()], self.mode)
        total = table
        for axis in reversed(range(self.n)):
            total = expect_axis(total, axis, self.weights[axis])
        value = np.asarray(total)[()]
        return value if self.mode == "rational" else float(value)

    def conditional_expectation(self, f: TableFunction, subset: Sequence[int]) -> np.ndarray:
        """E[f | X_i, i∈L]，返回以 L 中坐标（升序）为轴的表

        L 为空时返回 0 维数组 E[f]；L 为全集时返回 f 本身。
        """
        keep = set(subset)
        table = self.evaluate(f)
        for axis in reversed(range(self.n)):
            if axis not in keep:
                table = expect_axis(table, axis, self.weights[axis])
        return np.asarray(table)

    def marginal_expectation(self, table: np.ndarray, subset: Sequence[int]) -> Scalar:
        """只依赖 L 中坐标的表（轴按 L 升序）在其边缘分布下的期望"""
        total = np.asarray(table)
        for position in reversed(range(len(subset))):
            total = expect_axis(total, position, self.weights[subset[position]])
        value = np.asarray(total)[()]
        return value if self.mode == "rational" else float(value)

    def broadcast_subset(self, table: np.ndarray, subset: Sequence[int]) -> np.ndarray:
        """把以 L 为轴的表还原成可与全表广播的形状"""
        shape = [1] * self.n
        for position, j in enumerate(subset):
            shape[j] = table.shape[position]
        return np.asarray(table).reshape(shape)


def expectation(space: OutcomeSpace, f: TableFunction) -> Scalar:
    return space.expectation(f)


def conditional_expectation(space: OutcomeSpace, f: TableFunction, subset: Sequence[int]) -> np.ndarray:
    return space.conditional_expectation(f, subset)


def _elementary_symmetric(space: OutcomeSpace, p: int) -> np.ndarray:
    # e_k(x_1..x_i) = e_k(x_1..x_{i-1}) + x_i e_{k-1}(x_1..x_{i-1})
    e = [np.asarray(zero(space.mode) + 1)] + [np.asarray(zero(space.mode))] * p
    for i in range(space.n):
        x = space.coordinate(i)
        for k in range(min(i + 1, p), 0, -1):
            e[k] = e[k] + x * e[k - 1]
    return e[p]


def tabulate(space: OutcomeSpace, spec: UStatisticSpec) -> np.ndarray:
    """W 在全部结果上的取值表

    核按子集轴广播后累加；对称乘积核族用初等对称多项式递推，不展开 C(n, p) 个子集。

    Args:
        space: 由 spec 构造的结果空间
        spec: 规格

    Returns:
        np.ndarray: 全表
    """
    family = spec.kernels
    if family.uniform is not None:
        table = _elementary_symmetric(space, spec.p) * family.uniform
    else:
        table = np.asarray(zero(space.mode))
        for subset, kernel in family.items(spec.n):
            values = kernel.table([space.supports[j] for j in subset], space.mode)
            table = table + space.broadcast_subset(values, subset)
    table = np.array(np.broadcast_to(table, space.shape))
    logger.debug(f"已生成 {spec.label()} 的取值表: 形状={space.shape}, 结果数={space.size}")
    return table
