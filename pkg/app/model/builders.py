"""构造规格：齐次和、取值表核、对称齐次和"""

from itertools import combinations
from math import comb
from typing import Mapping, Optional, Sequence

import numpy as np

from app.model.distributions import Distribution, FiniteDistribution
from app.model.kernels import KernelFamily, ProductKernel, Subset, TableKernel
from app.model.scalar import Mode, Scalar, array_dtype, is_zero, parse_scalar
from app.model.spec import UStatisticSpec
from app.model.tables import canonical_projection
from app.utils.errors import MixedOrder, NonCentered, NonUnitVariance, SpecError
from app.utils.logger import logger


def _common_mode(variables: Sequence[Distribution], mode: Optional[Mode]) -> Mode:
    finite_modes = {v.mode for v in variables if v.has_support}
    if mode is None:
        if len(finite_modes) > 1:
            raise SpecError("变量混用了有理模式与实数模式")
        mode = finite_modes.pop() if finite_modes else "real"
    if mode == "rational" and not all(v.has_support for v in variables):
        raise SpecError("只能采样的变量只能用于实数模式")
    return mode


def _check_standardized(variables: Sequence[Distribution], mode: Mode) -> None:
    for i, variable in enumerate(variables):
        if not variable.has_support:
            continue
        if not is_zero(variable.mean(), mode):
            logger.error(f"变量 X_{i + 1} 未中心化: 均值 {variable.mean()}")
            raise NonCentered(f"X_{i + 1} 的均值为 {variable.mean()}，齐次和要求中心化变量")
        if not is_zero(variable.variance() - 1, mode):
            logger.error(f"变量 X_{i + 1} 方差不为 1: {variable.variance()}")
            raise NonUnitVariance(f"X_{i + 1} 的方差为 {variable.variance()}，齐次和要求单位方差")


def _is_iid(variables: Sequence[Distribution]) -> bool:
    return all(v == variables[0] for v in variables[1:])


def build_homogeneous_sum(
    coeffs: Mapping[Subset, Scalar],
    variables: Sequence[Distribution],
    mode: Optional[Mode] = None,
    symmetric: Optional[bool] = None,
    name: Optional[str] = None,
) -> UStatisticSpec:
    """构造齐次和 Y = Σ_J a_J ∏_{i∈J} Y_i

    Args:
        coeffs: 0 起始子集到系数 a_J 的映射
        variables: 中心化、单位方差的变量
        mode: 缺省时取变量的模式
        symmetric: 缺省时自动判断（同分布且全部 p 子集系数相同）
        name: 规格名称

    Returns:
        UStatisticSpec: 核为 (x_i) ↦ a_J ∏ x_i 的规格

    Raises:
        MixedOrder: 子集大小不一致
        NonCentered / NonUnitVariance: 变量不满足齐次和的前提
    """
    variables = tuple(variables)
    mode = _common_mode(variables, mode)
    if not coeffs:
        raise SpecError("系数表为空，无法确定阶数")
    orders = {len(subset) for subset in coeffs}
    if len(orders) != 1:
        raise MixedOrder(f"子集大小不一致: {sorted(orders)}")
    p = orders.pop()
    _check_standardized(variables, mode)

    entries = {tuple(sorted(subset)): ProductKernel(parse_scalar(a, mode)) for subset, a in coeffs.items()}
    if symmetric is None:
        values = set(k.coefficient for k in entries.values())
        symmetric = _is_iid(variables) and len(entries) == comb(len(variables), p) and len(values) == 1
    spec = UStatisticSpec(
        n=len(variables),
        p=p,
        variables=variables,
        kernels=KernelFamily(p, entries),
        mode=mode,
        symmetric=bool(symmetric),
        name=name,
    )
    logger.debug(f"构造齐次和: n={spec.n}, p={p}, 子集数={len(entries)}, 对称={spec.symmetric}")
    return spec


def build_symmetric_sum(
    n: int,
    p: int,
    law: Distribution,
    coefficient: Scalar,
    mode: Optional[Mode] = None,
    name: Optional[str] = None,
) -> UStatisticSpec:
    """全部 p 子集共享同一系数的对称齐次和，核族不展开"""
    variables = tuple([law] * n)
    mode = _common_mode(variables, mode)
    _check_standardized(variables[:1], mode)
    return UStatisticSpec(
        n=n,
        p=p,
        variables=variables,
        kernels=KernelFamily(p, {}, parse_scalar(coefficient, mode)),
        mode=mode,
        symmetric=True,
        name=name,
    )


def build_table_spec(
    tables: Mapping[Subset, object],
    variables: Sequence[FiniteDistribution],
    canonicalize: bool = False,
    symmetric: bool = False,
    mode: Optional[Mode] = None,
    name: Optional[str] = None,
) -> UStatisticSpec:
    """由显式取值表构造规格

    Args:
        tables: 0 起始子集到取值表（嵌套列表或数组，轴按子集升序）
        variables: 有限支撑变量
        canonicalize: 为 True 时把每个核替换为其规范投影 ∏_{j∈J}(I - E_j)ψ_J
        symmetric: 对称标记
        mode: 缺省时取变量的模式
        name: 规格名称

    Returns:
        UStatisticSpec: 取值表核规格
    """
    variables = tuple(variables)
    mode = _common_mode(variables, mode)
    if not tables:
        raise SpecError("取值表为空，无法确定阶数")
    orders = {len(subset) for subset in tables}
    if len(orders) != 1:
        raise MixedOrder(f"子集大小不一致: {sorted(orders)}")
    p = orders.pop()

    entries = {}
    for subset, raw in tables.items():
        subset = tuple(sorted(subset))
        shape = tuple(variables[j].size for j in subset)
        flat = np.asarray(raw, dtype=object).reshape(-1)
        values = np.empty(flat.shape, dtype=array_dtype(mode))
        values[:] = [parse_scalar(v, mode) for v in flat]
        if values.size != int(np.prod(shape)):
            raise SpecError(f"子集 {[j + 1 for j in subset]} 的取值表大小 {values.size} 与支撑 {shape} 不符")
        values = values.reshape(shape)
        if canonicalize:
            values = canonical_projection(values, [variables[j].probs_array() for j in subset])
        entries[subset] = TableKernel(values)
    return UStatisticSpec(
        n=len(variables),
        p=p,
        variables=variables,
        kernels=KernelFamily(p, entries),
        mode=mode,
        symmetric=symmetric,
        name=name,
    )


def all_subsets_coefficients(n: int, p: int, coefficient: Scalar) -> dict[Subset, Scalar]:
    return {subset: coefficient for subset in combinations(range(n), p)}
