"""Berry–Esseen 与 Wasserstein 界的显式公式及 κ_p 的取值规则"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from app.manager.settings_manager import settings_manager
from app.model.scalar import Scalar, parse_scalar
from app.model.spec import UStatisticSpec
from app.utils.errors import InvalidKappa, KappaUnknown, OutOfRange
from app.utils.logger import logger

# 界中取整后的常数
KOLMOGOROV_EXCESS = Fraction("11.9")
KOLMOGOROV_RHO = Fraction("3.5")
KOLMOGOROV_RHO_KAPPA = Fraction("10.8")
SYMMETRIC_EXCESS = Fraction(12)
SYMMETRIC_RHO = Fraction(19)

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
WASSERSTEIN_EXCESS = SQRT_2_OVER_PI + 4.0 / 3.0
WASSERSTEIN_RHO = SQRT_2_OVER_PI + 2.0 * math.sqrt(2.0) / math.sqrt(3.0)

KAPPA_USER = "user"
KAPPA_SYMMETRIC = "paper-symmetric"


@dataclass(frozen=True)
class KappaChoice:
    value: Scalar
    provenance: str


@dataclass(frozen=True)
class BoundInputs:
    """归一化 W 的界所需的输入

    Attributes:
        fourth_moment: E[W⁴]
        rho: ρ_n ≥ 0
        kappa: κ_p > 0，未知时为 None
        p, n: 阶数与变量个数
        symmetric: 是否对称
        rho2: 精确的 ρ_n²（有时）
        source: "exact" | "analytic" | "declared" | "mc" | "inputs"
        kappa_provenance: κ 的来源
    """

    fourth_moment: Scalar
    rho: float
    kappa: Optional[Scalar]
    p: int
    n: int
    symmetric: bool = False
    rho2: Optional[Scalar] = None
    source: str = "exact"
    kappa_provenance: Optional[str] = None

    def __post_init__(self):
        if self.rho < 0:
            raise OutOfRange(f"ρ={self.rho} 必须非负")
        if self.kappa is not None and self.kappa <= 0:
            raise InvalidKappa(f"κ={self.kappa} 必须为正")
        if float(self.fourth_moment) < 1.0 - settings_manager.eps_num:
            raise OutOfRange(f"E[W⁴]={self.fourth_moment} 小于 1，与 Var(W)=1 矛盾")

    @property
    def excess(self) -> float:
        """√|E[W⁴] - 3|"""
        return math.sqrt(abs(float(self.fourth_moment) - 3.0))

    def require_kappa(self) -> float:
        if self.kappa is None:
            raise KappaUnknown("非对称规格需要提供 κ_p")
        return float(self.kappa)


@dataclass(frozen=True)
class ChainBound:
    """证明中未化简的界与其不依赖 p 的化简形式"""

    pre_simplification: float
    p_free: float
    theorem: float


def kolmogorov_bound(inputs: BoundInputs) -> float:
    """11.9√|E[W⁴] - 3| + (3.5 + 10.8√κ)ρ"""
    sqrt_kappa = math.sqrt(inputs.require_kappa())
    return float(KOLMOGOROV_EXCESS) * inputs.excess + (
        float(KOLMOGOROV_RHO) + float(KOLMOGOROV_RHO_KAPPA) * sqrt_kappa
    ) * inputs.rho


def symmetric_bound(fourth_moment: Scalar, p: int, n: int) -> float:
    """对称情形 12√|E[W⁴] - 3| + 19p/√n"""
    return float(SYMMETRIC_EXCESS) * math.sqrt(abs(float(fourth_moment) - 3.0)) + float(SYMMETRIC_RHO) * p / math.sqrt(n)


def wasserstein_bound(inputs: BoundInputs) -> float:
    """(√(2/π) + 4/3)√|E[W⁴] - 3| + √κ (√(2/π) + 2√2/√3) ρ"""
    sqrt_kappa = math.sqrt(inputs.require_kappa())
    return WASSERSTEIN_EXCESS * inputs.excess + sqrt_kappa * WASSERSTEIN_RHO * inputs.rho


def proof_chain_bound(inputs: BoundInputs) -> ChainBound:
    """√|E4-3| + √κρ + (1/p)√((8p+64p²)|E4-3| + (12p+96p²)κρ²) 与
    (1 + 2√2 + 8)√|E4-3| + (√κ + 2√3 + 4√6√κ)ρ"""
    kappa = inputs.require_kappa()
    p = inputs.p
    excess2 = abs(float(inputs.fourth_moment) - 3.0)
    rho = inputs.rho
    sqrt_kappa = math.sqrt(kappa)
    inner = (8 * p + 64 * p * p) * excess2 + (12 * p + 96 * p * p) * kappa * rho * rho
    pre = math.sqrt(excess2) + sqrt_kappa * rho + math.sqrt(inner) / p
    p_free = (1 + 2 * math.sqrt(2) + 8) * math.sqrt(excess2) + (
        sqrt_kappa + 2 * math.sqrt(3) + 4 * math.sqrt(6) * sqrt_kappa
    ) * rho
    return ChainBound(pre, p_free, kolmogorov_bound(inputs))


def kappa_policy(spec: UStatisticSpec, user_kappa=None) -> KappaChoice:
    """κ_p 的取值：用户给定值优先，对称规格默认 2p，其余情形报错

    Raises:
        InvalidKappa: 用户给定值不为正或无法解析
        KappaUnknown: 非对称规格且没有给定 κ
    """
    if user_kappa is not None:
        try:
            value = parse_scalar(user_kappa, spec.mode) if isinstance(user_kappa, str) else user_kappa
        except ValueError as e:
            raise InvalidKappa(f"无法解析 κ: {user_kappa!r}") from e
        if value <= 0:
            logger.error(f"κ={value} 不为正")
            raise InvalidKappa(f"κ={value} 必须为正")
        return KappaChoice(value, KAPPA_USER)
    if spec.symmetric:
        value = Fraction(2 * spec.p) if spec.mode == "rational" else float(2 * spec.p)
        return KappaChoice(value, KAPPA_SYMMETRIC)
    logger.error(f"{spec.label()} 不是对称规格，且没有提供 κ")
    raise KappaUnknown(f"{spec.label()} 不是对称规格，需要用 --kappa 提供 κ_p")


def dk_dw_consistency(dk: float, dw: float, eps: Optional[float] = None) -> bool:
    """d_K ≤ √d_W"""
    eps = settings_manager.eps_num if eps is None else eps
    return dk <= math.sqrt(max(dw, 0.0)) + eps
