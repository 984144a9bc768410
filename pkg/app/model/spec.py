"""退化 U 统计量 W 的规格"""

from dataclasses import dataclass, replace
from math import prod
from typing import Optional

import numpy as np

from app.model.distributions import Distribution
from app.model.kernels import KernelFamily
from app.model.scalar import Mode, Scalar


@dataclass(frozen=True)
class UStatisticSpec:
    """W = Σ_{|J|=p} ψ_J(X_i, i∈J) 的完整描述

    Attributes:
        n: 变量个数
        p: 阶数
        variables: n 个变量的分布
        kernels: 核函数族
        mode: "rational" 或 "real"
        symmetric: 是否为对称 U 统计量（同分布变量 + 同一个对称核）
        rho2: 声明的 ρ_n²，只在无法精确分解时使用
        name: 报告中使用的标识
    """

    n: int
    p: int
    variables: tuple
    kernels: KernelFamily
    mode: Mode = "rational"
    symmetric: bool = False
    rho2: Optional[Scalar] = None
    name: Optional[str] = None

    @property
    def is_finite(self) -> bool:
        return all(v.has_support for v in self.variables)

    def supports(self) -> list[np.ndarray]:
        return [v.values_array() for v in self.variables]

    def weights(self) -> list[np.ndarray]:
        return [v.probs_array() for v in self.variables]

    def outcome_count(self) -> int:
        if not self.is_finite:
            raise ValueError("存在只能采样的变量，结果空间不是有限的")
        return prod(v.size for v in self.variables)

    def variable(self, i: int) -> Distribution:
        return self.variables[i]

    def rescale(self, factor: Scalar) -> "UStatisticSpec":
        """返回 cW 的规格（声明的 ρ² 是归一化后的量，不随缩放改变）"""
        return replace(self, kernels=self.kernels.scaled(factor))

    def label(self) -> str:
        return self.name or f"n{self.n}-p{self.p}"
