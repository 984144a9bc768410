"""核函数族 {ψ_J}

子集 J 在内部一律是 0 起始的升序 tuple，对外（JSON、报告）才转换为 1 起始。
"""

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterator, Optional, Union

import numpy as np

from app.model.scalar import Mode, Scalar, full, one

Subset = tuple[int, ...]


def outer_product(vectors: list[np.ndarray], mode: Mode) -> np.ndarray:
    """多个一维数组的外积，返回形状为各长度组成的数组"""
    if not vectors:
        return full((), one(mode), mode)
    result = vectors[0]
    for vec in vectors[1:]:
        result = np.multiply.outer(result, vec)
    return result


@dataclass(frozen=True)
class ProductKernel:
    """乘积型核 (x_i)_{i∈J} ↦ a_J ∏ x_i，只保存系数"""

    coefficient: Scalar

    def table(self, supports: list[np.ndarray], mode: Mode) -> np.ndarray:
        return outer_product(supports, mode) * self.coefficient

    def scaled(self, factor: Scalar) -> "ProductKernel":
        return ProductKernel(self.coefficient * factor)

    def permuted(self, axes: list[int]) -> "ProductKernel":
        return self


@dataclass(frozen=True, eq=False)
class TableKernel:
    """显式取值表，轴顺序与 J 的升序一致"""

    values: np.ndarray

    def table(self, supports: list[np.ndarray], mode: Mode) -> np.ndarray:
        return self.values

    def scaled(self, factor: Scalar) -> "TableKernel":
        return TableKernel(self.values * factor)

    def permuted(self, axes: list[int]) -> "TableKernel":
        return TableKernel(np.transpose(self.values, axes))


Kernel = Union[ProductKernel, TableKernel]


@dataclass(frozen=True)
class KernelFamily:
    """阶数为 p 的核函数族

    entries 显式列出每个 J；uniform 不为 None 时表示全部 p 子集共享同一个乘积系数，
    此时不展开（n 很大时 C(n, p) 个子集无法物化）。
    """

    order: int
    entries: dict = field(default_factory=dict)
    uniform: Optional[Scalar] = None

    def items(self, n: int) -> Iterator[tuple[Subset, Kernel]]:
        if self.uniform is not None:
            kernel = ProductKernel(self.uniform)
            for subset in combinations(range(n), self.order):
                yield subset, kernel
        else:
            yield from sorted(self.entries.items())

    def subset_count(self, n: int) -> int:
        if self.uniform is not None:
            return comb(n, self.order)
        return len(self.entries)

    @property
    def is_product(self) -> bool:
        return self.uniform is not None or all(isinstance(k, ProductKernel) for k in self.entries.values())

    def coefficients(self, n: int) -> dict[Subset, Scalar]:
        """乘积型核族的系数表"""
        if not self.is_product:
            raise ValueError("只有乘积型核族才有系数表")
        return {subset: kernel.coefficient for subset, kernel in self.items(n)}

    def expanded(self, n: int) -> "KernelFamily":
        if self.uniform is None:
            return self
        return KernelFamily(self.order, dict(self.items(n)))

    def scaled(self, factor: Scalar) -> "KernelFamily":
        if self.uniform is not None:
            return KernelFamily(self.order, {}, self.uniform * factor)
        return KernelFamily(self.order, {j: k.scaled(factor) for j, k in self.entries.items()})
