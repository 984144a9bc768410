"""有限支撑的一维分布"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from app.manager.settings_manager import settings_manager
from app.utils.logger import logger


@dataclass(frozen=True, eq=False)
class DiscreteLaw:
    """按取值升序排列的原子

    Attributes:
        values: 严格递增的取值
        probs: 对应概率
        exact: 有理模式下的精确原子 ((value, prob), ...)，否则为 None
    """

    values: np.ndarray
    probs: np.ndarray
    exact: Optional[tuple] = None

    @property
    def size(self) -> int:
        return len(self.values)

    def cdf(self) -> np.ndarray:
        """每个原子处的 F(w)"""
        return np.minimum(np.cumsum(self.probs), 1.0)

    def left_cdf(self) -> np.ndarray:
        """每个原子处的左极限 F(w-)"""
        return np.concatenate(([0.0], self.cdf()[:-1]))

    def moment(self, k: int) -> float:
        return float(np.dot(self.probs, self.values**k))

    def atoms(self) -> list[tuple]:
        if self.exact is not None:
            return list(self.exact)
        return list(zip(self.values.tolist(), self.probs.tolist()))


def discrete_law(values: Sequence, probs: Sequence) -> DiscreteLaw:
    """合并重复取值并排序

    全部为 Fraction 时按精确值合并并保留精确原子；否则按浮点值合并。

    Raises:
        ValueError: 长度不一致、为空、概率为负或概率和不为 1
    """
    values = list(values)
    probs = list(probs)
    if len(values) != len(probs) or not values:
        raise ValueError("取值与概率必须等长且非空")
    if all(isinstance(v, Fraction) for v in values) and all(isinstance(p, Fraction) for p in probs):
        merged: dict = {}
        for v, p in zip(values, probs):
            merged[v] = merged.get(v, Fraction(0)) + p
        exact = tuple(sorted((v, p) for v, p in merged.items() if p != 0))
        if any(p < 0 for _, p in exact) or sum(p for _, p in exact) != 1:
            raise ValueError("精确分布的概率必须非负且和为 1")
        law = DiscreteLaw(
            np.array([float(v) for v, _ in exact], dtype=np.float64),
            np.array([float(p) for _, p in exact], dtype=np.float64),
            exact,
        )
    else:
        unique, inverse = np.unique(np.asarray(values, dtype=np.float64), return_inverse=True)
        merged_probs = np.bincount(inverse.ravel(), weights=np.asarray(probs, dtype=np.float64), minlength=len(unique))
        if np.any(merged_probs < -settings_manager.eps_num):
            raise ValueError("概率不能为负")
        law = DiscreteLaw(unique, merged_probs)
    total = float(law.probs.sum())
    if abs(total - 1.0) > settings_manager.eps_num:
        logger.error(f"分布的概率和为 {total}")
        raise ValueError(f"分布的概率和为 {total}，应为 1")
    return law


def empirical_law(samples: np.ndarray) -> DiscreteLaw:
    """样本的经验分布"""
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ValueError("样本不能为空")
    unique, counts = np.unique(samples, return_counts=True)
    return DiscreteLaw(unique, counts / samples.size)
