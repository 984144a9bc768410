"""W 的矩"""

import numpy as np

from app.engine.outcome_space import OutcomeSpace
from app.model.scalar import Scalar
from app.utils.errors import OutOfRange

MAX_MOMENT = 8


def moment(space: OutcomeSpace, table: np.ndarray, k: int) -> Scalar:
    """精确的 E[W^k]，k ∈ {1, ..., 8}

    Raises:
        OutOfRange: k 不在允许范围内
    """
    if not 1 <= k <= MAX_MOMENT:
        raise OutOfRange(f"矩的阶数 k={k} 必须在 1..{MAX_MOMENT} 之间")
    return space.expectation(np.asarray(table) ** k)


def variance(space: OutcomeSpace, table: np.ndarray) -> Scalar:
    mean = moment(space, table, 1)
    return moment(space, table, 2) - mean * mean


def moment_summary(space: OutcomeSpace, table: np.ndarray, orders=(1, 2, 3, 4)) -> dict[int, Scalar]:
    return {k: moment(space, table, k) for k in orders}
