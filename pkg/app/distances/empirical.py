"""样本与 N(0,1) 的经验距离及 DKW 置信带"""

import math

import numpy as np

from app.distances.exact import kolmogorov_exact, wasserstein_exact
from app.distances.law import empirical_law
from app.utils.errors import OutOfRange


def dkw_band(m: int, delta: float) -> float:
    """Dvoretzky–Kiefer–Wolfowitz 半径 √(ln(2/δ) / (2m))

    Raises:
        OutOfRange: m < 1 或 δ 不在 (0, 1) 内
    """
    if m < 1:
        raise OutOfRange(f"样本数 m={m} 必须为正")
    if not 0.0 < delta < 1.0:
        raise OutOfRange(f"置信参数 δ={delta} 必须在 (0, 1) 内")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * m))


def empirical_kolmogorov(samples: np.ndarray, delta: float = 0.01) -> tuple[float, float]:
    """单样本 KS 统计量与 DKW 半径"""
    law = empirical_law(samples)
    return kolmogorov_exact(law), dkw_band(int(np.asarray(samples).size), delta)


def empirical_wasserstein(samples: np.ndarray) -> float:
    """∫ |F_m - Φ|，F_m 为经验阶梯函数"""
    return wasserstein_exact(empirical_law(samples))
