"""规格的结构检查，只返回违规列表，不抛异常

退化性不在这里检查，那是精确引擎的工作。
"""

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from app.model.kernels import ProductKernel, TableKernel
from app.model.scalar import EPS_NUM
from app.model.spec import UStatisticSpec


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


def _check_variables(spec: UStatisticSpec) -> list[Violation]:
    violations = []
    for i, variable in enumerate(spec.variables):
        label = f"X_{i + 1}"
        if not variable.has_support:
            if spec.mode == "rational":
                violations.append(Violation("SamplerInRationalMode", f"{label} 只能采样，不能用于有理模式"))
            continue
        if variable.mode != spec.mode:
            violations.append(Violation("ModeMismatch", f"{label} 的模式 {variable.mode} 与规格 {spec.mode} 不一致"))
        if variable.size == 0:
            violations.append(Violation("EmptySupport", f"{label} 没有原子"))
            continue
        if len(variable.values) != len(variable.probs):
            violations.append(Violation("AtomMismatch", f"{label} 的取值与概率个数不同"))
        bad = [prob for prob in variable.probs if prob <= 0]
        if bad:
            violations.append(Violation("InvalidProbability", f"{label} 含非正概率 {bad[0]}"))
        total = sum(variable.probs)
        if (spec.mode == "rational" and total != 1) or (spec.mode == "real" and abs(float(total) - 1.0) > EPS_NUM):
            violations.append(Violation("ProbabilitySum", f"{label} 的概率和为 {total}"))
        if len(set(variable.values)) != len(variable.values):
            violations.append(Violation("DuplicateAtom", f"{label} 含重复取值"))
    return violations


def _check_kernels(spec: UStatisticSpec) -> list[Violation]:
    family = spec.kernels
    violations = []
    if family.order != spec.p:
        violations.append(Violation("KernelOrderMismatch", f"核族阶数 {family.order} 与 p={spec.p} 不一致"))
    if family.uniform is not None:
        return violations
    for subset, kernel in family.entries.items():
        label = [j + 1 for j in subset]
        if len(subset) != spec.p:
            violations.append(Violation("KernelOrderMismatch", f"子集 {label} 的大小不是 {spec.p}"))
        if any(j < 0 or j >= spec.n for j in subset):
            violations.append(Violation("SubsetOutOfRange", f"子集 {label} 超出 [1, {spec.n}]"))
            continue
        if len(set(subset)) != len(subset) or list(subset) != sorted(subset):
            violations.append(Violation("SubsetNotAscending", f"子集 {label} 不是严格升序"))
        if isinstance(kernel, TableKernel):
            if not all(spec.variables[j].has_support for j in subset):
                violations.append(Violation("TableNeedsSupport", f"子集 {label} 的取值表需要有限支撑变量"))
                continue
            expected = tuple(spec.variables[j].size for j in subset)
            if kernel.values.shape != expected:
                violations.append(
                    Violation("TableShapeMismatch", f"子集 {label} 的取值表形状 {kernel.values.shape} 应为 {expected}")
                )
        elif not isinstance(kernel, ProductKernel):
            violations.append(Violation("UnknownKernel", f"子集 {label} 的核类型未知"))
    return violations


def _check_symmetric(spec: UStatisticSpec) -> list[Violation]:
    if not spec.symmetric:
        return []
    violations = []
    first = spec.variables[0] if spec.variables else None
    if any(v != first for v in spec.variables):
        violations.append(Violation("SymmetricMismatch", "对称规格要求所有变量同分布"))
        return violations
    family = spec.kernels
    if family.uniform is not None:
        return violations
    if len(family.entries) != sum(1 for _ in combinations(range(spec.n), spec.p)):
        violations.append(Violation("SymmetricMismatch", "对称规格要求包含全部 p 子集"))
        return violations
    kernels = list(family.entries.values())
    if all(isinstance(k, ProductKernel) for k in kernels):
        if len({k.coefficient for k in kernels}) != 1:
            violations.append(Violation("SymmetricMismatch", "对称规格要求所有系数相同"))
    elif all(isinstance(k, TableKernel) for k in kernels):
        reference = kernels[0].values
        if any(k.values.shape != reference.shape or (k.values != reference).any() for k in kernels[1:]):
            violations.append(Violation("SymmetricMismatch", "对称规格要求所有核相同"))
        elif any((np.transpose(reference, perm) != reference).any() for perm in permutations(range(spec.p))):
            violations.append(Violation("SymmetricMismatch", "对称规格要求核是对称函数"))
    else:
        violations.append(Violation("SymmetricMismatch", "对称规格不能混用乘积核与取值表核"))
    return violations


def validate_spec(spec: UStatisticSpec) -> list[Violation]:
    """检查规格的结构不变量

    Args:
        spec: 待检查的规格

    Returns:
        list[Violation]: 违规列表，为空表示结构合法
    """
    violations = []
    if spec.p < 1:
        violations.append(Violation("InvalidOrder", f"阶数 p={spec.p} 必须为正"))
    if spec.p > spec.n:
        violations.append(Violation("OrderExceedsN", f"p={spec.p} 大于 n={spec.n}"))
    if len(spec.variables) != spec.n:
        violations.append(Violation("VariableCountMismatch", f"变量个数 {len(spec.variables)} 与 n={spec.n} 不一致"))
        return violations
    violations.extend(_check_variables(spec))
    violations.extend(_check_kernels(spec))
    violations.extend(_check_symmetric(spec))
    return violations
