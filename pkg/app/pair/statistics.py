"""可交换对的各项统计量：线性回归性质、条件二阶矩、四阶增量与 Shao–Zhang 两项"""

from dataclasses import dataclass

import numpy as np

from app.engine.hoeffding import hoeffding_decompose, is_zero_table
from app.engine.law import group_by_value, group_sums
from app.model.scalar import Scalar, zero, zeros
from app.pair.context import PairContext, substitute
from app.pair.theta import theta
from app.utils.logger import logger


def _max_abs(table: np.ndarray) -> Scalar:
    table = np.asarray(table)
    if table.size == 0:
        return 0
    value = np.max(np.abs(table))
    return value if table.dtype == object else float(value)


@dataclass(frozen=True, eq=False)
class ConditionalSquare:
    """T(x) = (n/2p) E[(W′ - W)² | X = x] 及其均值、方差"""

    table: np.ndarray
    mean: Scalar
    variance: Scalar


@dataclass(frozen=True, eq=False)
class WConditioning:
    """按 W 的取值分组后的条件期望

    Attributes:
        keys: W 的各个取值
        values: 每组的条件期望
        probs: 每组的概率
        table: 条件期望拉回到 X 上的表
    """

    keys: list
    values: np.ndarray
    probs: np.ndarray
    table: np.ndarray

    def as_dict(self) -> dict:
        return dict(zip(self.keys, self.values.tolist()))


@dataclass(frozen=True)
class ShaoZhangTerms:
    """term1 = E|1 - E[T|W]|，term2 = (n/p) E|E[θ(W′ - W)|W]|，以及对 X 取条件的版本"""

    term1: Scalar
    term2: Scalar
    term1_given_x: Scalar
    term2_given_x: Scalar

    @property
    def total(self) -> Scalar:
        return self.term1 + self.term2


@dataclass(frozen=True)
class ExpansionCheck:
    """T 的 Hoeffding 分量与 ((2p - |M|)/2p) U_M 的逐项比较（W² = Σ U_M）"""

    equal: bool
    max_discrepancy: Scalar
    components: int


def regression_check(ctx: PairContext) -> Scalar:
    """max_x |E[W′ - W | X = x] + λ W(x)|，退化时有理模式下恰为 0"""
    drift = ctx.conditional_on_x(lambda d: d)
    residual = _max_abs(drift + ctx.lam * ctx.table)
    logger.debug(f"{ctx.name}: 回归残差 {residual}")
    return residual


def conditional_squared_increment(ctx: PairContext) -> ConditionalSquare:
    """T = (1/2p) Σ_i E_{Y_i}[D_i²]"""
    table = ctx.sum_over_indices(lambda d: d * d) * ctx.ratio(1, 2 * ctx.p)
    return ConditionalSquare(table, ctx.expectation(table), ctx.variance(table))


def mean_sq_increment(ctx: PairContext) -> Scalar:
    """E[(W′ - W)²]，归一化退化规格下等于 2p/n"""
    return ctx.expectation(ctx.conditional_on_x(lambda d: d * d))


def increment_fourth(ctx: PairContext) -> Scalar:
    """(n/4p) E[(W′ - W)⁴] = (1/4p) Σ_i E[D_i⁴]"""
    return ctx.expectation(ctx.sum_over_indices(lambda d: (d * d) * (d * d))) * ctx.ratio(1, 4 * ctx.p)


def condition_on_w(ctx: PairContext, table: np.ndarray) -> WConditioning:
    """E[g | W]，g 是 X 上的表（对 (W, W′) 的函数先用 conditional_on_x 化为 X 上的表）

    有理模式按精确值分组；实数模式按 engine.real_key_quantum 量化后分组。
    """
    keys, groups = group_by_value(ctx.table, ctx.mode)
    weights = ctx.space.joint_weights()
    probs = group_sums(weights, groups, len(keys), ctx.mode)
    sums = group_sums(np.asarray(table) * weights, groups, len(keys), ctx.mode)
    values = sums / probs
    return WConditioning(keys, values, probs, values[groups])


def lemma3_energy(ctx: PairContext, square: ConditionalSquare | None = None) -> Scalar:
    """E[W² · (n/2p) E[(W′ - W)² | W]]"""
    square = square or conditional_squared_increment(ctx)
    conditioned = condition_on_w(ctx, square.table)
    return ctx.expectation(ctx.table * ctx.table * conditioned.table)


def theta_drift(ctx: PairContext) -> np.ndarray:
    """(n/p) E[θ(W′ - W) | X] = (1/p) Σ_i E_{Y_i}[θ(D_i)]"""
    return ctx.sum_over_indices(theta) * ctx.ratio(1, ctx.p)


def shzh_terms(ctx: PairContext, square: ConditionalSquare | None = None) -> ShaoZhangTerms:
    """Berry–Esseen 不等式右端的两项，同时给出对 W 与对 X 取条件的版本"""
    square = square or conditional_squared_increment(ctx)
    one = zero(ctx.mode) + 1
    term1_x = ctx.expectation(np.abs(one - square.table))
    term1 = ctx.expectation(np.abs(one - condition_on_w(ctx, square.table).table))
    drift = theta_drift(ctx)
    term2_x = ctx.expectation(np.abs(drift))
    term2 = ctx.expectation(np.abs(condition_on_w(ctx, drift).table))
    return ShaoZhangTerms(term1, term2, term1_x, term2_x)


def hoeffding_of_conditional(ctx: PairContext, square: ConditionalSquare | None = None) -> ExpansionCheck:
    """逐个子集 M 比较 T 的分量与 ((2p - |M|)/2p) U_M"""
    square = square or conditional_squared_increment(ctx)
    squared = hoeffding_decompose(ctx.space, ctx.table * ctx.table, keep_zero=True)
    conditional = hoeffding_decompose(ctx.space, square.table, keep_zero=True)
    worst = zero(ctx.mode)
    for u, v in zip(squared, conditional):
        factor = ctx.ratio(2 * ctx.p - len(u.subset), 2 * ctx.p)
        gap = _max_abs(v.table - u.table * factor)
        worst = max(worst, gap)
    equal = is_zero_table(np.asarray(worst), ctx.mode)
    if not equal:
        logger.warning(f"{ctx.name}: 条件二阶矩的 Hoeffding 展开不一致，最大偏差 {worst}")
    return ExpansionCheck(equal, worst, len(squared))


def exchangeability_check(ctx: PairContext) -> Scalar:
    """max_{a,b} |P(W=a, W′=b) - P(W=b, W′=a)|

    W′ 的取值必然是 W 在另一个结果上的取值，所以两者共用同一套分组编号。
    """
    keys, groups = group_by_value(ctx.table, ctx.mode)
    count = len(keys)
    joint = zeros((count, count), ctx.mode)
    weights = ctx.space.joint_weights()[..., np.newaxis]
    share = ctx.ratio(1, ctx.n)
    for i in range(ctx.n):
        after = substitute(groups, [i])
        shape = np.broadcast_shapes(groups[..., np.newaxis].shape, after.shape)
        rows = np.broadcast_to(groups[..., np.newaxis], shape).ravel()
        cols = np.broadcast_to(after, shape).ravel()
        mass = np.broadcast_to(weights * ctx.space.weights[i] * share, shape).ravel()
        np.add.at(joint, (rows, cols), mass)
    return _max_abs(joint - joint.T)
