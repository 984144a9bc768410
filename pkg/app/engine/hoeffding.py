"""Hoeffding 分解：子集上的 zeta 变换（条件期望）与 Möbius 反演

子集用位掩码表示，第 k 位对应 X_{k+1}。中间表一律保持全维形状，
不在子集中的轴长度为 1，这样 Möbius 反演可以直接靠广播相减。
"""

from dataclasses import dataclass, field
from math import comb, prod
from typing import Optional

import numpy as np

from app.engine.outcome_space import OutcomeSpace, check_outcome_budget, check_subset_budget, tabulate
from app.manager.settings_manager import settings_manager
from app.model.kernels import Subset
from app.model.scalar import Mode, Scalar, zero
from app.model.spec import UStatisticSpec
from app.model.tables import expect_axis
from app.utils.logger import logger
from app.utils.serialize import format_scalar, table_to_json


@dataclass(frozen=True, eq=False)
class HoeffdingComponent:
    """W_J：只依赖 J 中坐标的取值表（轴按 J 升序）与 σ_J² = E[W_J²]"""

    subset: Subset
    table: np.ndarray
    sigma2: Scalar

    def to_dict(self) -> dict:
        return {
            "subset": [j + 1 for j in self.subset],
            "sigma2": format_scalar(self.sigma2),
            "table": table_to_json(self.table),
        }


@dataclass(frozen=True)
class DegeneracyResult:
    degenerate: bool
    offenders: list = field(default_factory=list)

    def offenders_one_based(self) -> list[list[int]]:
        return [[j + 1 for j in subset] for subset in self.offenders]


def mask_to_subset(mask: int, n: int) -> Subset:
    return tuple(k for k in range(n) if mask >> k & 1)


def subset_to_mask(subset) -> int:
    mask = 0
    for k in subset:
        mask |= 1 << k
    return mask


def is_zero_table(table: np.ndarray, mode: Mode, eps: Optional[float] = None) -> bool:
    table = np.asarray(table)
    if table.size == 0:
        return True
    if mode == "rational":
        return bool(np.all(table == 0))
    eps = settings_manager.eps_num if eps is None else eps
    return bool(np.max(np.abs(table.astype(np.float64))) <= eps)


def zeta_transform(space: OutcomeSpace, table: np.ndarray) -> list[np.ndarray]:
    """全部 2^n 个条件期望 E[W | X_i, i∈L]

    从全集往下递推：每个 L 由 L ∪ {k}（k 为 L 之外最低位）积掉第 k 个坐标得到，
    每个子集只算一次。

    Args:
        space: 结果空间
        table: W 的全表

    Returns:
        list[np.ndarray]: 以位掩码为下标的条件期望表（全维，L 之外的轴长度为 1）

    Raises:
        SubsetBudgetExceeded: n 超过位掩码上限
        SpaceTooLarge: 结果个数 ∏|E_i| 超过 engine.max_outcomes，或全部中间表的单元总数
            ∏(1 + |E_i|) 超过 engine.max_transform_cells
    """
    n = space.n
    check_subset_budget(n)
    check_outcome_budget(space.size)
    check_outcome_budget(
        prod(1 + k for k in space.shape),
        "子集变换的中间表",
        settings_manager.max_transform_cells,
        "DEJONG_MAX_TRANSFORM_CELLS",
    )
    full = (1 << n) - 1
    cond: list = [None] * (full + 1)
    cond[full] = np.asarray(table)
    for mask in range(full - 1, -1, -1):
        k = next(b for b in range(n) if not mask >> b & 1)
        parent = cond[mask | 1 << k]
        cond[mask] = np.expand_dims(expect_axis(parent, k, space.weights[k]), k)
    return cond


def mobius_transform(cond: list[np.ndarray], n: int) -> list[np.ndarray]:
    """W_J = Σ_{L⊆J} (-1)^{|J|-|L|} E[W | X_L]，按位做差分"""
    out = list(cond)
    for k in range(n):
        bit = 1 << k
        for mask in range(len(out)):
            if mask & bit:
                out[mask] = out[mask] - out[mask ^ bit]
    return out


def _squeeze(table: np.ndarray, subset: Subset) -> np.ndarray:
    return np.asarray(table).reshape(tuple(table.shape[j] for j in subset))


def hoeffding_decompose(space: OutcomeSpace, table: np.ndarray, keep_zero: bool = False) -> list[HoeffdingComponent]:
    """Hoeffding 分解 W = Σ_J W_J

    Args:
        space: 结果空间
        table: W 的全表
        keep_zero: 为 True 时保留恒为 0 的分量

    Returns:
        list[HoeffdingComponent]: 按 (|J|, J) 排序的分量
    """
    n = space.n
    parts = mobius_transform(zeta_transform(space, table), n)
    components = []
    for mask, part in enumerate(parts):
        subset = mask_to_subset(mask, n)
        if not keep_zero and is_zero_table(part, space.mode):
            continue
        squeezed = _squeeze(part, subset)
        sigma2 = space.marginal_expectation(squeezed * squeezed, subset)
        components.append(HoeffdingComponent(subset, squeezed, sigma2))
    components.sort(key=lambda c: (len(c.subset), c.subset))
    logger.debug(f"Hoeffding 分解完成: n={n}, 非零分量 {sum(1 for c in components if c.subset)} 个")
    return components


def reconstruct(space: OutcomeSpace, components: list[HoeffdingComponent]) -> np.ndarray:
    """Σ_J W_J 还原为全表"""
    table = np.asarray(zero(space.mode))
    for component in components:
        table = table + space.broadcast_subset(component.table, component.subset)
    return np.array(np.broadcast_to(table, space.shape))


def check_degeneracy(space: OutcomeSpace, spec: UStatisticSpec, table: Optional[np.ndarray] = None) -> DegeneracyResult:
    """W 是否完全退化：|K| ≠ p 的分量全部为 0

    Returns:
        DegeneracyResult: 结论与非零的违规子集
    """
    if table is None:
        table = tabulate(space, spec)
    offenders = [c.subset for c in hoeffding_decompose(space, table) if len(c.subset) != spec.p]
    if offenders:
        logger.warning(f"{spec.label()} 不是 {spec.p} 阶完全退化的: 违规子集 {[[j + 1 for j in s] for s in offenders]}")
    return DegeneracyResult(not offenders, offenders)


def component_variances(components: list[HoeffdingComponent]) -> tuple[dict, Scalar]:
    """σ_J² 表与 Var(W) = Σ_{J≠∅} σ_J²"""
    variances = {c.subset: c.sigma2 for c in components}
    nonempty = [s for j, s in variances.items() if j]
    total = sum(nonempty[1:], nonempty[0]) if nonempty else 0
    return variances, total


def rho_squared(variances: dict, n: int) -> Scalar:
    """ρ_n² = max_i Σ_{J∋i} σ_J²"""
    if n == 0:
        return 0
    influences = []
    for i in range(n):
        terms = [s for subset, s in variances.items() if i in subset]
        influences.append(sum(terms[1:], terms[0]) if terms else 0)
    return max(influences)


def analytic_variances(spec: UStatisticSpec) -> tuple[Scalar, Scalar]:
    """乘积型核族的 (Var(W), ρ²)，σ_J² = a_J² ∏_{i∈J} Var X_i，不需要枚举

    Raises:
        ValueError: 核族不是乘积型
    """
    family = spec.kernels
    if family.uniform is not None:
        c2 = family.uniform * family.uniform
        var_x = spec.variables[0].variance()
        unit = c2 * var_x**spec.p
        return unit * comb(spec.n, spec.p), unit * comb(spec.n - 1, spec.p - 1)
    variances = {}
    for subset, coefficient in family.coefficients(spec.n).items():
        value = coefficient * coefficient
        for j in subset:
            value = value * spec.variables[j].variance()
        variances[subset] = value
    total = sum(variances.values(), zero(spec.mode))
    return total, rho_squared(variances, spec.n)


def decomposition_document(components: list[HoeffdingComponent], variance: Scalar, rho2: Scalar) -> dict:
    """分解导出格式"""
    return {
        "components": [c.to_dict() for c in components],
        "var": format_scalar(variance),
        "rho2": format_scalar(rho2),
    }
