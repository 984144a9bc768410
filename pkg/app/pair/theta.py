"""θ(x) = |x|x 与差分统计量 D_i = W^{(i)} - W

D_i 本身是 n+1 个变量 (X_1, ..., X_n, X_{n+1} := Y_i) 上的 p 阶完全退化 U 统计量，
它的可交换对 (D_i, D_i′) 直接复用 PairContext 的构造。
"""

from dataclasses import dataclass

import numpy as np

from app.engine.outcome_space import check_outcome_budget
from app.model.kernels import KernelFamily, TableKernel
from app.model.scalar import Scalar
from app.model.spec import UStatisticSpec
from app.pair.context import PairContext, substitute


def theta(x):
    """θ(x) = |x|x，对 Fraction、float 与数组都适用，有理数下封闭"""
    return abs(x) * x


def taylor_slack(x, y):
    """8x²(y-x)² + 2(y-x)⁴ - (θ(y) - θ(x))²，应当非负"""
    h = y - x
    return 8 * x * x * h * h + 2 * h**4 - (theta(y) - theta(x)) ** 2


def taylor_quadratic_bound(pairs) -> bool:
    """(θ(y) - θ(x))² ≤ 8x²(y-x)² + 2(y-x)⁴ 对所有给定的 (x, y) 成立"""
    return all(taylor_slack(x, y) >= 0 for x, y in pairs)


@dataclass(frozen=True, eq=False)
class PairGrid:
    """(x, y_i, y_j) 上的四个增量

    d_i = D_i，d_j = D_j，d_ij = D_i^{(j)}，d_ji = D_j^{(i)}；weights 为联合概率。
    """

    i: int
    j: int
    d_i: np.ndarray
    d_j: np.ndarray
    d_ij: np.ndarray
    d_ji: np.ndarray
    weights: np.ndarray

    def expectation(self, values) -> Scalar:
        total = np.sum(np.broadcast_to(values, self.weights.shape) * self.weights)
        return total if self.weights.dtype == object else float(total)


def pair_grid(ctx: PairContext, i: int, j: int) -> PairGrid:
    """在 (x, y_i, y_j) 上展开 W、W^{(i)}、W^{(j)}、W^{(i,j)}

    Raises:
        ValueError: i == j
        SpaceTooLarge: 展开后的空间超过上限
    """
    if i == j:
        raise ValueError("i 与 j 必须不同")
    k_i, k_j = ctx.space.shape[i], ctx.space.shape[j]
    check_outcome_budget(ctx.space.size * k_i * k_j, "(x, y_i, y_j) 空间")
    w = ctx.table[..., np.newaxis, np.newaxis]
    w_i = substitute(ctx.table, [i])[..., np.newaxis]
    w_j = np.expand_dims(substitute(ctx.table, [j]), ctx.n)
    w_ij = substitute(ctx.table, [i, j])
    weights = (
        ctx.space.joint_weights()[..., np.newaxis, np.newaxis]
        * ctx.space.weights[i][:, np.newaxis]
        * ctx.space.weights[j][np.newaxis, :]
    )
    return PairGrid(i, j, w_i - w, w_j - w, w_ij - w_j, w_ij - w_i, weights)


@dataclass(frozen=True)
class ThetaIdentity:
    """E[θ(D_i)θ(D_j)] 与 ¼E[(θ(D_i^{(j)}) - θ(D_i))(θ(D_j^{(i)}) - θ(D_j))]

    cross = E[θ(D_i^{(j)})θ(D_j)]，swapped = E[θ(D_i^{(j)})θ(D_j^{(i)})]；
    应有 cross = -lhs = -swapped。
    """

    i: int
    j: int
    lhs: Scalar
    rhs: Scalar
    cross: Scalar
    swapped: Scalar

    @property
    def discrepancy(self) -> Scalar:
        return max(abs(self.lhs - self.rhs), abs(self.cross + self.lhs), abs(self.swapped - self.lhs))


def theta_product_identity(ctx: PairContext, i: int, j: int, grid: PairGrid | None = None) -> ThetaIdentity:
    grid = grid or pair_grid(ctx, i, j)
    t_i, t_j, t_ij, t_ji = theta(grid.d_i), theta(grid.d_j), theta(grid.d_ij), theta(grid.d_ji)
    lhs = grid.expectation(t_i * t_j)
    rhs = grid.expectation((t_ij - t_i) * (t_ji - t_j)) * ctx.ratio(1, 4)
    return ThetaIdentity(i, j, lhs, rhs, grid.expectation(t_ij * t_j), grid.expectation(t_ij * t_ji))


def conditional_independence(ctx: PairContext, i: int, j: int) -> Scalar:
    """max_x |Cov(θ(D_i), θ(D_j) | X = x)|，给定 X 时二者分别只依赖 Y_i 与 Y_j"""
    t_i = theta(ctx.increment(i))[..., :, np.newaxis]
    t_j = np.expand_dims(theta(ctx.increment(j)), -2)
    w_i = ctx.space.weights[i][:, np.newaxis]
    w_j = ctx.space.weights[j][np.newaxis, :]
    joint = (t_i * t_j * w_i * w_j).sum(axis=(-2, -1))
    separate = ctx.expect_y(i, theta(ctx.increment(i))) * ctx.expect_y(j, theta(ctx.increment(j)))
    gap = np.abs(joint - separate)
    value = np.max(gap)
    return value if gap.dtype == object else float(value)


def theta_means(ctx: PairContext) -> list[Scalar]:
    """E[θ(D_i)]，i = 1..n，由 D_i 分布的对称性应全为 0"""
    return [ctx.expectation(ctx.expect_y(i, theta(d))) for i, d in enumerate(ctx.increments)]


@dataclass(frozen=True, eq=False)
class DifferenceStatistic:
    """D_i 作为 n+1 个变量上的规格，以及它在 (x, y_i) 上的取值表"""

    index: int
    spec: UStatisticSpec
    table: np.ndarray


def _difference_kernels(spec: UStatisticSpec, i: int) -> KernelFamily:
    n = spec.n
    entries: dict = {}
    for subset, kernel in spec.kernels.items(n):
        if i not in subset:
            continue
        lifted = tuple(k for k in subset if k != i) + (n,)
        position = subset.index(i)
        entries[subset] = kernel.scaled(-1)
        if isinstance(kernel, TableKernel):
            entries[lifted] = TableKernel(np.moveaxis(kernel.values, position, -1))
        else:
            entries[lifted] = kernel
    return KernelFamily(spec.p, entries)


def difference_statistic(ctx: PairContext, i: int) -> DifferenceStatistic:
    """D_i = W^{(i)} - W = Σ_{J∋i} (ψ_J(x 中 x_i 换为 x_{n+1}) - ψ_J(x))

    Raises:
        ValueError: 上下文没有关联的规格
    """
    spec = ctx.spec
    if spec is None:
        raise ValueError("差分统计量需要原始规格")
    lifted = UStatisticSpec(
        n=spec.n + 1,
        p=spec.p,
        variables=spec.variables + (spec.variables[i],),
        kernels=_difference_kernels(spec, i),
        mode=spec.mode,
        name=f"{spec.label()}-D{i + 1}",
    )
    return DifferenceStatistic(i, lifted, np.array(ctx.increment(i)))


def lifted_pair(ctx: PairContext, i: int) -> PairContext:
    """(D_i, D_i′) 的上下文：n+1 个变量，λ = p/(n+1)"""
    space = ctx.lifted_space(i)
    check_outcome_budget(space.size * max(space.shape), "提升后的替换空间")
    spec = difference_statistic(ctx, i).spec if ctx.spec is not None else None
    return PairContext(space, np.array(ctx.increment(i)), ctx.p, spec, f"{ctx.name}-D{i + 1}")
