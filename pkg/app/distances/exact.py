"""离散分布与 N(0,1) 之间的 Kolmogorov / Wasserstein 距离

F 是右连续阶梯函数而 Φ 连续，所以 sup_t |F(t) - Φ(t)| 只可能在原子处取到，
取 F(w) 或左极限 F(w-) 中的较大偏差即可。
"""

import numpy as np

from app.distances.law import DiscreteLaw
from app.distances.normal import normal_cdf, normal_pdf, normal_quantiles


def kolmogorov_exact(law: DiscreteLaw) -> float:
    """d_K = max_w max(|F(w-) - Φ(w)|, |F(w) - Φ(w)|)"""
    phi = normal_cdf(law.values)
    gaps = np.maximum(np.abs(law.left_cdf() - phi), np.abs(law.cdf() - phi))
    return float(min(1.0, gaps.max()))


def _antiderivative(t: np.ndarray) -> np.ndarray:
    # G(t) = tΦ(t) + φ(t)，G' = Φ，G(-∞) = 0
    return t * normal_cdf(t) + normal_pdf(t)


def wasserstein_exact(law: DiscreteLaw) -> float:
    """d_W = ∫ |F(t) - Φ(t)| dt 的闭式积分

    每段 [w_k, w_{k+1}) 上 F 恒为 c_k，在 Φ^{-1}(c_k) 处把被积函数分成 c - Φ 与 Φ - c 两部分；
    左尾 ∫Φ = G(w_1)，右尾 ∫(1 - Φ) = G(-w_m)，不需要截断。
    """
    w = law.values
    total = _antiderivative(w[0]) + _antiderivative(-w[-1])
    if law.size > 1:
        a, b = w[:-1], w[1:]
        c = law.cdf()[:-1]
        s = np.clip(normal_quantiles(c), a, b)
        g_a, g_b, g_s = _antiderivative(a), _antiderivative(b), _antiderivative(s)
        below = c * (s - a) - (g_s - g_a)
        above = (g_b - g_s) - c * (b - s)
        total = total + np.sum(below + above)
    return float(max(0.0, total))


def wasserstein_error_budget(law: DiscreteLaw) -> float:
    """闭式积分覆盖整条实轴，没有截断误差"""
    return 0.0
