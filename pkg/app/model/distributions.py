"""单个变量 X_i 的分布：有限支撑分布与仅能采样的分布"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from app.model.scalar import Mode, Scalar, as_array, parse_scalar, zero


@dataclass(frozen=True)
class FiniteDistribution:
    """有限支撑分布，atoms 为 (取值, 概率)

    构造时不做合法性检查，由 validate_spec 统一报告。
    """

    values: tuple
    probs: tuple
    mode: Mode = "rational"
    name: Optional[str] = field(default=None, compare=False)

    has_support = True

    @classmethod
    def from_atoms(cls, atoms, mode: Mode = "rational", name: Optional[str] = None) -> "FiniteDistribution":
        values = tuple(parse_scalar(v, mode) for v, _ in atoms)
        probs = tuple(parse_scalar(p, mode) for _, p in atoms)
        return cls(values, probs, mode, name)

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def atoms(self) -> list[tuple[Scalar, Scalar]]:
        return list(zip(self.values, self.probs))

    def values_array(self) -> np.ndarray:
        return as_array(self.values, self.mode)

    def probs_array(self) -> np.ndarray:
        return as_array(self.probs, self.mode)

    def moment(self, k: int) -> Scalar:
        return sum((p * v**k for v, p in zip(self.values, self.probs)), zero(self.mode))

    def mean(self) -> Scalar:
        return self.moment(1)

    def variance(self) -> Scalar:
        mu = self.mean()
        return self.moment(2) - mu * mu

    def to_mode(self, mode: Mode) -> "FiniteDistribution":
        if mode == self.mode:
            return self
        if mode == "real":
            return FiniteDistribution(
                tuple(float(v) for v in self.values), tuple(float(p) for p in self.probs), "real", self.name
            )
        return FiniteDistribution(
            tuple(Fraction(str(v)) for v in self.values),
            tuple(Fraction(str(p)) for p in self.probs),
            "rational",
            self.name,
        )

    def sample_index(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """逆 CDF 采样，返回原子下标"""
        cdf = np.cumsum(np.asarray([float(p) for p in self.probs], dtype=np.float64))
        cdf /= cdf[-1]
        index = np.searchsorted(cdf, rng.random(size), side="right")
        np.minimum(index, self.size - 1, out=index)
        return index

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray([float(v) for v in self.values], dtype=np.float64)[self.sample_index(rng, size)]


@dataclass(frozen=True)
class SamplerDistribution:
    """只能用于蒙特卡洛的分布，均已标准化（均值 0、方差 1）"""

    name: str
    mode: Mode = "real"

    has_support = False

    def mean(self) -> float:
        return 0.0

    def variance(self) -> float:
        return 1.0

    def moment(self, k: int) -> float:
        return SAMPLER_MOMENTS[self.name](k)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return SAMPLERS[self.name](rng, size)


Distribution = Union[FiniteDistribution, SamplerDistribution]


def _normal_moment(k: int) -> float:
    if k % 2:
        return 0.0
    out = 1.0
    for j in range(k - 1, 0, -2):
        out *= j
    return out


def _uniform_moment(k: int) -> float:
    # U(-√3, √3)
    if k % 2:
        return 0.0
    return 3.0 ** (k / 2) / (k + 1)


SAMPLERS = {
    "normal": lambda rng, size: rng.standard_normal(size),
    "rademacher": lambda rng, size: rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0,
    "uniform": lambda rng, size: rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size),
}

SAMPLER_MOMENTS = {
    "normal": _normal_moment,
    "rademacher": lambda k: 0.0 if k % 2 else 1.0,
    "uniform": _uniform_moment,
}


def rademacher(mode: Mode = "rational") -> FiniteDistribution:
    return FiniteDistribution.from_atoms([("-1", "1/2"), ("1", "1/2")], mode, "rademacher")


def three_point(mode: Mode = "rational") -> FiniteDistribution:
    """偏态三点分布 {-1: 1/3, 0: 1/2, 2: 1/6}，均值 0、方差 1"""
    return FiniteDistribution.from_atoms([("-1", "1/3"), ("0", "1/2"), ("2", "1/6")], mode, "three-point")


def sparse_three_point(mode: Mode = "rational") -> FiniteDistribution:
    """对称三点分布 {-2: 1/8, 0: 3/4, 2: 1/8}，均值 0、方差 1"""
    return FiniteDistribution.from_atoms([("-2", "1/8"), ("0", "3/4"), ("2", "1/8")], mode, "sparse-three-point")


NAMED_LAWS = {
    "rademacher": rademacher,
    "three-point": three_point,
    "sparse-three-point": sparse_three_point,
}
