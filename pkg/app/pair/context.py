"""可交换对 (W, W′)：均匀选一个坐标 α，用独立副本 Y_α 替换 X_α

不展开 (x, y) 的完整乘积空间。对每个替换坐标 i，只在 (x, y_i) 上计算：
E[g(W, W′) | X] = (1/n) Σ_i E_{Y_i}[g(W, W^{(i)})]。
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from app.engine.outcome_space import OutcomeSpace, check_outcome_budget, tabulate
from app.model.scalar import Mode, Scalar
from app.model.spec import UStatisticSpec


def ratio(numerator: int, denominator: int, mode: Mode) -> Scalar:
    return Fraction(numerator, denominator) if mode == "rational" else numerator / denominator


def substitute(table: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """把 table 中的坐标 axes 换成新的尾部坐标

    返回数组在 axes 位置长度为 1，并在末尾按 axes 的顺序追加长度为 |E_a| 的轴，
    即 out[x, y_1, ..., y_m] = table(x 中第 axes[t] 个坐标换成 y_t)。
    """
    n = table.ndim
    m = len(axes)
    moved = np.moveaxis(table, list(axes), list(range(n - m, n)))
    return np.expand_dims(moved, tuple(sorted(axes)))


@dataclass(frozen=True, eq=False)
class PairContext:
    """可交换对的计算上下文

    Attributes:
        space: X 的结果空间（Y 与之同分布）
        table: W 的全表
        p: 阶数，λ = p/n
        spec: 原始规格（由取值表直接构造的上下文可以没有）
        name: 报告中使用的标识
    """

    space: OutcomeSpace
    table: np.ndarray
    p: int
    spec: Optional[UStatisticSpec] = None
    name: str = "W"

    @classmethod
    def from_spec(cls, spec: UStatisticSpec, table: Optional[np.ndarray] = None) -> "PairContext":
        """由规格构造上下文

        Raises:
            UnsupportedVariable / SpaceTooLarge: 同 OutcomeSpace.from_spec
        """
        space = OutcomeSpace.from_spec(spec)
        check_outcome_budget(space.size * max(space.shape, default=1), "替换空间")
        if table is None:
            table = tabulate(space, spec)
        return cls(space, table, spec.p, spec, spec.label())

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def mode(self) -> Mode:
        return self.space.mode

    @property
    def lam(self) -> Scalar:
        """回归系数 λ = p/n"""
        return ratio(self.p, self.n, self.mode)

    def ratio(self, numerator: int, denominator: int) -> Scalar:
        return ratio(numerator, denominator, self.mode)

    def replaced(self, i: int) -> np.ndarray:
        """W^{(i)}，形状为 X 的形状（第 i 轴长度 1）加上 y_i 轴"""
        return substitute(self.table, [i])

    def increment(self, i: int) -> np.ndarray:
        """D_i = W^{(i)} - W 在 (x, y_i) 上的取值"""
        return self.replaced(i) - self.table[..., np.newaxis]

    @cached_property
    def increments(self) -> tuple:
        return tuple(self.increment(i) for i in range(self.n))

    def expect_y(self, i: int, values: np.ndarray) -> np.ndarray:
        """对 y_i 求期望，返回 X 上的表"""
        return (values * self.space.weights[i]).sum(axis=-1)

    def sum_over_indices(self, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Σ_i E_{Y_i}[g(D_i)]，X 上的表"""
        total = None
        for i, d in enumerate(self.increments):
            term = self.expect_y(i, g(d))
            total = term if total is None else total + term
        return total

    def conditional_on_x(self, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """E[g(W′ - W) | X] = (1/n) Σ_i E_{Y_i}[g(D_i)]"""
        return self.sum_over_indices(g) * self.ratio(1, self.n)

    def expectation(self, table: np.ndarray) -> Scalar:
        return self.space.expectation(table)

    def variance(self, table: np.ndarray) -> Scalar:
        mean = self.expectation(table)
        return self.expectation(table * table) - mean * mean

    def lifted_space(self, i: int) -> OutcomeSpace:
        """(X_1, ..., X_n, X_{n+1} := Y_i) 的结果空间"""
        space = self.space
        return OutcomeSpace.from_marginals(
            space.supports + (space.supports[i],), space.weights + (space.weights[i],), space.mode
        )

    def as_real(self) -> "PairContext":
        """转换为浮点计算的上下文"""
        if self.mode == "real":
            return self
        space = OutcomeSpace(
            tuple(s.astype(np.float64) for s in self.space.supports),
            tuple(w.astype(np.float64) for w in self.space.weights),
            "real",
        )
        return PairContext(space, self.table.astype(np.float64), self.p, None, self.name)
