"""共享夹具与随机退化规格电池

电池中的规格全部是有理模式、n ≤ 5 的小规格，由种子决定，可复现：
    种子 % 4 == 0  对称 Rademacher 齐次和（系数不展开）
    种子 % 4 == 1  变量分布各不相同的齐次和（随机子集与系数）
    种子 % 4 == 2  规范投影后的随机取值表核
    种子 % 4 == 3  三点分布上的对称齐次和（系数展开）
"""

from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from app.engine.outcome_space import OutcomeSpace, tabulate
from app.manager.study_manager import StudyManager
from app.model import build_homogeneous_sum, build_symmetric_sum, build_table_spec, load_spec
from app.model.distributions import NAMED_LAWS
from app.pair.context import PairContext

ROOT = Path(__file__).resolve().parent.parent
SPECS = ROOT / "specs"
FAMILIES = ROOT / "families"

BATTERY_SIZE = 200
LAW_NAMES = sorted(NAMED_LAWS)


def _law(name: str):
    return NAMED_LAWS[name]("rational")


def _random_subsets(rng: np.random.Generator, n: int, p: int) -> list[tuple[int, ...]]:
    subsets = list(combinations(range(n), p))
    count = int(rng.integers(1, len(subsets) + 1))
    chosen = rng.choice(len(subsets), size=count, replace=False)
    return [subsets[k] for k in sorted(chosen)]


def _nonzero_fraction(rng: np.random.Generator) -> Fraction:
    numerator = int(rng.choice([-3, -2, -1, 1, 2, 3]))
    return Fraction(numerator, int(rng.integers(1, 4)))


def battery_spec(seed: int):
    rng = np.random.default_rng(seed)
    kind = seed % 4
    name = f"battery-{seed}"
    if kind == 0:
        n = int(rng.integers(2, 6))
        p = int(rng.integers(1, min(3, n) + 1))
        return build_symmetric_sum(n, p, _law("rademacher"), Fraction(int(rng.integers(1, 4))), "rational", name)
    if kind == 1:
        n = int(rng.integers(2, 5))
        p = int(rng.integers(1, min(3, n) + 1))
        variables = [_law(LAW_NAMES[int(rng.integers(len(LAW_NAMES)))]) for _ in range(n)]
        coeffs = {subset: _nonzero_fraction(rng) for subset in _random_subsets(rng, n, p)}
        return build_homogeneous_sum(coeffs, variables, "rational", None, name)
    if kind == 2:
        n = int(rng.integers(2, 5))
        p = int(rng.integers(1, min(2, n) + 1))
        variables = [_law(LAW_NAMES[int(rng.integers(len(LAW_NAMES)))]) for _ in range(n)]
        subsets = _random_subsets(rng, n, p)
        while True:
            tables = {
                subset: rng.integers(-2, 3, size=tuple(variables[j].size for j in subset)).tolist()
                for subset in subsets
            }
            spec = build_table_spec(tables, variables, canonicalize=True, name=name)
            table = tabulate(OutcomeSpace.from_spec(spec), spec)
            if any(value != 0 for value in table.ravel()):
                return spec
    n = int(rng.integers(2, 5))
    p = int(rng.integers(1, min(2, n) + 1))
    coeffs = {subset: Fraction(1) for subset in combinations(range(n), p)}
    return build_homogeneous_sum(coeffs, [_law("three-point")] * n, "rational", None, name)


def is_symmetric_rademacher(seed: int) -> bool:
    return seed % 4 == 0


@pytest.fixture
def specs_dir() -> Path:
    return SPECS


@pytest.fixture
def families_dir() -> Path:
    return FAMILIES


@pytest.fixture
def x1x2():
    return load_spec(SPECS / "x1x2.json")


@pytest.fixture
def half_sum4():
    return load_spec(SPECS / "half_sum4.json")


@pytest.fixture
def skewed_pairs():
    return load_spec(SPECS / "skewed_pairs.json")


@pytest.fixture
def not_degenerate():
    return load_spec(SPECS / "not_degenerate.json")


@pytest.fixture
def gaussian_pairs():
    return load_spec(SPECS / "gaussian_pairs.json")


@pytest.fixture
def x1x2_ctx(x1x2) -> PairContext:
    return PairContext.from_spec(x1x2)


@pytest.fixture
def study() -> StudyManager:
    return StudyManager()
