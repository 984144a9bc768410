"""标准正态分布的 Φ、φ 与分位数"""

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from app.utils.errors import OutOfRange

QUANTILE_CLAMP = 9.0
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def normal_cdf(t):
    """Φ(t)，限制在 [0, 1] 内，支持数组"""
    return np.clip(ndtr(t), 0.0, 1.0)


def normal_pdf(t):
    t = np.asarray(t, dtype=np.float64)
    return np.exp(-0.5 * t * t) * _INV_SQRT_2PI


def normal_quantile(q: float) -> float:
    """Φ^{-1}(q)，在 [-9, 9] 上对 Φ 做 Brent 求根，区间外截断到端点

    Raises:
        OutOfRange: q 不在 (0, 1) 内
    """
    q = float(q)
    if not 0.0 < q < 1.0:
        raise OutOfRange(f"分位数参数 q={q} 必须在 (0, 1) 内")
    if q <= ndtr(-QUANTILE_CLAMP):
        return -QUANTILE_CLAMP
    if q >= ndtr(QUANTILE_CLAMP):
        return QUANTILE_CLAMP
    return float(brentq(lambda t: ndtr(t) - q, -QUANTILE_CLAMP, QUANTILE_CLAMP, xtol=1e-15, maxiter=200))


def normal_quantiles(q: np.ndarray) -> np.ndarray:
    """向量化的 Φ^{-1}，截断到 [-9, 9]"""
    return np.clip(ndtri(np.asarray(q, dtype=np.float64)), -QUANTILE_CLAMP, QUANTILE_CLAMP)


class NormalEval:
    """无状态的标准正态求值器"""

    cdf = staticmethod(normal_cdf)
    pdf = staticmethod(normal_pdf)
    quantile = staticmethod(normal_quantile)
