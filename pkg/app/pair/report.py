"""可交换对的完整核查：恒等式、引理中的不等式与 Berry–Esseen 证明链

所有引理都写成不依赖归一化的形式（v = Var(W)），比如
Var(T) ≤ E[W⁴] - 3v² + κρ²v，这样缩放过的规格也能直接核查。
"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from app.distances.exact import kolmogorov_exact
from app.distances.law import DiscreteLaw
from app.engine.hoeffding import analytic_variances, component_variances, hoeffding_decompose, rho_squared
from app.engine.law import exact_law
from app.manager.settings_manager import settings_manager
from app.model.scalar import Mode, Scalar, is_nonnegative
from app.pair.context import PairContext
from app.pair.statistics import (
    ShaoZhangTerms,
    condition_on_w,
    conditional_squared_increment,
    exchangeability_check,
    hoeffding_of_conditional,
    increment_fourth,
    lemma3_energy,
    mean_sq_increment,
    regression_check,
    shzh_terms,
)
from app.pair.theta import conditional_independence, lifted_pair, theta, theta_means, theta_product_identity
from app.utils.errors import SpaceTooLarge
from app.utils.logger import logger
from app.utils.serialize import format_decimal, format_scalar, scalar_fields

CHAIN_TOLERANCE = 1e-9


def _vanishes(value: Scalar, mode: Mode, scale: float = 1.0) -> bool:
    if mode == "rational":
        return value == 0
    return abs(float(value)) <= settings_manager.eps_num * max(1.0, abs(float(scale)))


def _influence(ctx: PairContext) -> tuple[Scalar, Optional[list]]:
    """(ρ² 未归一化, 违规子集)；分解超出上限时对乘积核族退回解析式，违规子集记为 None"""
    try:
        components = hoeffding_decompose(ctx.space, ctx.table)
    except SpaceTooLarge:
        if ctx.spec is None or not ctx.spec.kernels.is_product:
            raise
        logger.warning(f"{ctx.name}: 子集变换超出上限，ρ² 改用解析式，跳过退化性检查")
        return analytic_variances(ctx.spec)[1], None
    variances, _ = component_variances(components)
    offenders = [c.subset for c in components if len(c.subset) != ctx.p]
    return rho_squared(variances, ctx.n), offenders


@dataclass
class PairReport:
    """一个规格上可交换对的全部核查结果

    lemma_slacks 中每一项都是“右端 - 左端”，应当非负；κ 未知时前两项为 None。
    """

    name: str
    n: int
    p: int
    mode: Mode
    lam: Scalar
    kappa: Optional[Scalar]
    kappa_provenance: Optional[str]
    variance: Scalar
    fourth_moment: Scalar
    rho2: Scalar
    offenders: Optional[list]
    regression_max_residual: Scalar
    mean_sq_increment: Scalar
    var_cond_sq: Scalar
    var_cond_sq_given_w: Scalar
    fourth_increment: Scalar
    lemma3_energy: Scalar
    lemma_slacks: dict
    shzh: ShaoZhangTerms
    exchangeability: Scalar
    expansion_equal: bool
    expansion_discrepancy: Scalar
    theta_mean_max: Scalar
    theta_identity_max: Scalar
    conditional_independence_max: Scalar
    lifted_regression_max: Scalar
    shzh_normalized: float
    exact_dk: float
    notes: list = field(default_factory=list)

    @property
    def normalized(self) -> bool:
        return _vanishes(self.variance - 1, self.mode)

    def violations(self) -> list[str]:
        mode = self.mode
        scale = self.fourth_moment
        found = []
        if self.offenders:
            found.append(f"NotDegenerate: 非零分量 {[[j + 1 for j in s] for s in self.offenders]}")
        checks = {
            "RegressionResidual": self.regression_max_residual,
            "MeanSquareIncrement": self.mean_sq_increment - 2 * self.p * self.variance / self.n,
            "Exchangeability": self.exchangeability,
            "ThetaMean": self.theta_mean_max,
            "ThetaIdentity": self.theta_identity_max,
            "ConditionalIndependence": self.conditional_independence_max,
            "LiftedRegression": self.lifted_regression_max,
        }
        for code, value in checks.items():
            if not _vanishes(value, mode, scale):
                found.append(f"{code}: 偏差 {format_scalar(value)}")
        if not self.expansion_equal:
            found.append(f"ConditionalExpansion: 偏差 {format_scalar(self.expansion_discrepancy)}")
        for name, slack in self.lemma_slacks.items():
            if slack is not None and not is_nonnegative(slack, mode, settings_manager.eps_num * max(1.0, float(scale))):
                found.append(f"{name}: 松弛量 {format_scalar(slack)} < 0")
        if not is_nonnegative(self.var_cond_sq - self.var_cond_sq_given_w, mode, settings_manager.eps_num):
            found.append("ConditioningVariance: Var(E[T|W]) > Var(T)")
        if self.shzh_normalized < self.exact_dk - settings_manager.eps_num:
            found.append(f"ShaoZhangDominance: {format_decimal(self.shzh_normalized)} < d_K={format_decimal(self.exact_dk)}")
        return found

    @property
    def passed(self) -> bool:
        return not self.violations()

    def to_dict(self) -> dict:
        doc = {"spec_id": self.name, "n": self.n, "p": self.p, "mode": self.mode, "lambda": format_scalar(self.lam)}
        doc.update(scalar_fields("var", self.variance))
        doc.update(scalar_fields("fourth_moment", self.fourth_moment))
        doc.update(scalar_fields("rho2", self.rho2))
        doc["kappa"] = format_scalar(self.kappa)
        doc["kappa_provenance"] = self.kappa_provenance
        doc["degenerate"] = None if self.offenders is None else not self.offenders
        doc.update(scalar_fields("regression_max_residual", self.regression_max_residual))
        doc.update(scalar_fields("mean_sq_increment", self.mean_sq_increment))
        doc.update(scalar_fields("var_cond_sq", self.var_cond_sq))
        doc.update(scalar_fields("var_cond_sq_given_w", self.var_cond_sq_given_w))
        doc.update(scalar_fields("fourth_increment", self.fourth_increment))
        doc.update(scalar_fields("lemma3_energy", self.lemma3_energy))
        doc["lemma_slacks"] = {name: format_scalar(slack) for name, slack in self.lemma_slacks.items()}
        doc["shzh"] = {
            "term1": format_scalar(self.shzh.term1),
            "term2": format_scalar(self.shzh.term2),
            "term1_given_x": format_scalar(self.shzh.term1_given_x),
            "term2_given_x": format_scalar(self.shzh.term2_given_x),
            "normalized_total": format_decimal(self.shzh_normalized),
        }
        doc["exchangeability"] = format_scalar(self.exchangeability)
        doc["conditional_expansion"] = {"equal": self.expansion_equal, "max_discrepancy": format_scalar(self.expansion_discrepancy)}
        doc["theta_mean_max"] = format_scalar(self.theta_mean_max)
        doc["theta_identity_max"] = format_scalar(self.theta_identity_max)
        doc["conditional_independence_max"] = format_scalar(self.conditional_independence_max)
        doc["lifted_regression_max"] = format_scalar(self.lifted_regression_max)
        doc["exact_dk"] = format_decimal(self.exact_dk)
        doc["notes"] = list(self.notes)
        doc["violations"] = self.violations()
        doc["passed"] = not doc["violations"]
        return doc


def _normalized_law(ctx: PairContext, v: Scalar) -> DiscreteLaw:
    law = exact_law(ctx.space, ctx.table)
    if _vanishes(v - 1, ctx.mode) or not float(v) > 0:
        return law
    return DiscreteLaw(np.asarray(law.values, dtype=np.float64) / math.sqrt(float(v)), np.asarray(law.probs, dtype=np.float64))


def _normalized_shzh(ctx: PairContext, v: Scalar, t_given_w: np.ndarray, shzh: ShaoZhangTerms) -> float:
    """W/√v 的 term1 + term2：θ 是二次齐次的，对 W 取条件与缩放无关，所以
    term1 = E|v - E[T|W]| / v，term2 = term2(W) / v"""
    if not float(v) > 0:
        return float("nan")
    term1 = ctx.expectation(np.abs(v - t_given_w))
    return float(term1 + shzh.term2) / float(v)


def _pairwise_max(values) -> Scalar:
    values = list(values)
    return max(values) if values else 0


def pair_report(ctx: PairContext, kappa: Optional[Scalar] = None, provenance: Optional[str] = None) -> PairReport:
    """计算可交换对的全部量

    Args:
        ctx: 可交换对上下文
        kappa: κ_p，None 时 lemma1、lemma2 两项松弛量记为 None 并标注“常数未核实”
        provenance: κ 的来源标签

    Returns:
        PairReport: 报告（违规通过 violations() 给出，不抛异常）

    Raises:
        SpaceTooLarge: 某个展开空间超过上限
    """
    mode = ctx.mode
    logger.info(f"{ctx.name}: 开始核查可交换对, n={ctx.n}, p={ctx.p}, 结果数={ctx.space.size}")
    w = ctx.table
    v = ctx.variance(w)
    e4 = ctx.expectation(w**4)
    rho2, offenders = _influence(ctx)

    square = conditional_squared_increment(ctx)
    by_w = condition_on_w(ctx, square.table)
    fourth = increment_fourth(ctx)
    energy = lemma3_energy(ctx, square)
    excess = e4 - 3 * v * v
    shzh = shzh_terms(ctx, square)

    notes = []
    if kappa is None:
        notes.append("unverified constant: κ 未知，lemma1、lemma2 未核查")
        logger.warning(f"{ctx.name}: 没有 κ，跳过依赖 κ 的引理")
    slacks = {
        "lemma1": None if kappa is None else excess + kappa * rho2 * v - square.variance,
        "lemma2": None if kappa is None else 2 * excess + 3 * kappa * rho2 * v - fourth,
        "lemma3a": e4 - energy,
        "lemma3b": 2 * e4 - fourth,
    }
    expansion = hoeffding_of_conditional(ctx, square)
    pairs = list(combinations(range(ctx.n), 2))
    identities = [theta_product_identity(ctx, i, j) for i, j in pairs]
    lifted = [regression_check(lifted_pair(ctx, i)) for i in range(ctx.n)]

    report = PairReport(
        name=ctx.name,
        n=ctx.n,
        p=ctx.p,
        mode=mode,
        lam=ctx.lam,
        kappa=kappa,
        kappa_provenance=provenance,
        variance=v,
        fourth_moment=e4,
        rho2=rho2,
        offenders=offenders,
        regression_max_residual=regression_check(ctx),
        mean_sq_increment=mean_sq_increment(ctx),
        var_cond_sq=square.variance,
        var_cond_sq_given_w=ctx.variance(by_w.table),
        fourth_increment=fourth,
        lemma3_energy=energy,
        lemma_slacks=slacks,
        shzh=shzh,
        shzh_normalized=_normalized_shzh(ctx, v, by_w.table, shzh),
        exchangeability=exchangeability_check(ctx),
        expansion_equal=expansion.equal,
        expansion_discrepancy=expansion.max_discrepancy,
        theta_mean_max=_pairwise_max(abs(m) for m in theta_means(ctx)),
        theta_identity_max=_pairwise_max(identity.discrepancy for identity in identities),
        conditional_independence_max=_pairwise_max(conditional_independence(ctx, i, j) for i, j in pairs),
        lifted_regression_max=_pairwise_max(lifted),
        exact_dk=kolmogorov_exact(_normalized_law(ctx, v)),
        notes=notes,
    )
    failures = report.violations()
    if failures:
        logger.warning(f"{ctx.name}: {len(failures)} 项核查未通过: {failures}")
    else:
        logger.info(f"{ctx.name}: 全部核查通过")
    return report


@dataclass(frozen=True)
class ChainStep:
    """证明链中的一步：lhs ≤ rhs，或 equality 为 True 时 lhs = rhs"""

    name: str
    lhs: float
    rhs: float
    equality: bool = False

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        tolerance = CHAIN_TOLERANCE * max(1.0, abs(self.rhs))
        if self.equality:
            return abs(self.slack) <= tolerance
        return self.slack >= -tolerance

    def to_dict(self) -> dict:
        return {
            "step": self.name,
            "relation": "=" if self.equality else "<=",
            "lhs": format_decimal(self.lhs),
            "rhs": format_decimal(self.rhs),
            "slack": format_decimal(self.slack),
            "holds": self.holds,
        }


@dataclass
class ChainReport:
    name: str
    kappa: float
    steps: list = field(default_factory=list)

    def add(self, name: str, lhs: float, rhs: float, equality: bool = False) -> None:
        self.steps.append(ChainStep(name, float(lhs), float(rhs), equality))

    def failures(self) -> list[ChainStep]:
        return [step for step in self.steps if not step.holds]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def step(self, name: str) -> ChainStep:
        return next(s for s in self.steps if s.name == name)

    def to_dict(self) -> dict:
        return {
            "spec_id": self.name,
            "kappa": format_decimal(self.kappa),
            "steps": [s.to_dict() for s in self.steps],
            "passed": self.passed,
        }


def proof_chain(ctx: PairContext, kappa: Scalar, rho2: Optional[Scalar] = None) -> ChainReport:
    """逐步核查 Berry–Esseen 证明中的每个不等式（浮点计算）

    Args:
        ctx: 可交换对上下文
        kappa: κ_p
        rho2: 未归一化的 ρ²，缺省时由分解求得

    Returns:
        ChainReport: 每一步的左右两端与松弛量
    """
    if rho2 is None:
        rho2, _ = _influence(ctx)
    real = ctx.as_real()
    n, p = real.n, real.p
    kappa = float(kappa)
    rho2 = float(rho2)
    chain = ChainReport(ctx.name, kappa)
    logger.info(f"{ctx.name}: 开始核查证明链, κ={kappa}")

    w = real.table
    v = real.variance(w)
    e4 = real.expectation(w**4)
    excess = e4 - 3 * v * v
    kappa_term = kappa * rho2 * v

    # term1
    square = conditional_squared_increment(real)
    t_w = condition_on_w(real, square.table).table
    var_t_w = real.variance(t_w)
    term1 = real.expectation(np.abs(v - t_w))
    chain.add("term1<=sd(T|W)", term1, math.sqrt(max(var_t_w, 0.0)))
    chain.add("sd(T|W)<=sd(T|X)", math.sqrt(max(var_t_w, 0.0)), math.sqrt(max(square.variance, 0.0)))
    chain.add(
        "sd(T|X)<=excess+kappa",
        math.sqrt(max(square.variance, 0.0)),
        math.sqrt(abs(excess)) + math.sqrt(kappa_term),
    )

    # term2: m_i = E[θ(D_i) | X]
    means = [real.expect_y(i, theta(d)) for i, d in enumerate(real.increments)]
    fourth_sum = sum(real.expectation(real.expect_y(i, d**4)) for i, d in enumerate(real.increments))
    var_sum = sum(real.variance(m) for m in means)
    mean_fourth = real.expectation(real.conditional_on_x(lambda d: d**4))
    chain.add("sum Var(m_i)<=sum E[D_i^4]", var_sum, fourth_sum)
    chain.add("sum E[D_i^4]=n E[(W'-W)^4]", fourth_sum, n * mean_fourth, equality=True)
    chain.add("n E[(W'-W)^4]<=lemma2", n * mean_fourth, 8 * p * excess + 12 * p * kappa_term)

    swap_fourth = 0.0
    swap_square = 0.0
    lifted_fourth = 0.0
    lifted_energy = 0.0
    for i in range(n):
        lifted = lifted_pair(real, i)
        d2 = lifted.table * lifted.table
        for j in range(n):
            if j == i:
                continue
            delta = lifted.increment(j)
            swap_fourth += lifted.expectation(lifted.expect_y(j, delta**4))
            swap_square += lifted.expectation(d2 * lifted.expect_y(j, delta * delta))
        lifted_fourth += lifted.expectation(lifted.sum_over_indices(lambda d: d**4))
        lifted_energy += lemma3_energy(lifted)
    chain.add("sum_ij E[(D_i^j-D_i)^4]<=lifted", swap_fourth, lifted_fourth)
    chain.add("lifted fourth<=8p sum E[D_i^4]", lifted_fourth, 8 * p * fourth_sum)
    chain.add("sum_ij E[D_i^2(D_i^j-D_i)^2]<=lifted", swap_square, 2 * p * lifted_energy)
    chain.add("lifted energy<=2p sum E[D_i^4]", 2 * p * lifted_energy, 2 * p * fourth_sum)

    cov_sum = 0.0
    for i, j in combinations(range(n), 2):
        cov_sum += 2 * real.expectation(means[i] * means[j])
    split = 2 * swap_square + 0.5 * swap_fourth
    chain.add("sum Cov(m_i,m_j)<=theta split", cov_sum, split)
    chain.add("theta split<=8p sum E[D_i^4]", split, 8 * p * fourth_sum)
    chain.add("8p n E[(W'-W)^4]<=64p^2 lemma2", 8 * p * n * mean_fourth, 64 * p * p * excess + 96 * p * p * kappa_term)

    total = sum(means[1:], means[0])
    terms = shzh_terms(real, square)
    term2_x = real.expectation(np.abs(total)) / p
    var_total = real.variance(total)
    inner = (8 * p + 64 * p * p) * excess + (12 * p + 96 * p * p) * kappa_term
    chain.add("term2<=term2|X", terms.term2, term2_x)
    chain.add("term2|X<=sd(sum m_i)/p", term2_x, math.sqrt(max(var_total, 0.0)) / p)
    chain.add("Var(sum m_i)=sum Var+sum Cov", var_total, var_sum + cov_sum, equality=True)
    chain.add("sd(sum m_i)/p<=bound", math.sqrt(max(var_total, 0.0)) / p, math.sqrt(max(inner, 0.0)) / p)

    bound = math.sqrt(abs(excess)) + math.sqrt(kappa_term) + math.sqrt(max(inner, 0.0)) / p
    chain.add("term1+term2<=pre-simplification bound", term1 + terms.term2, bound)
    if abs(v - 1.0) <= settings_manager.eps_num:
        dk = kolmogorov_exact(exact_law(real.space, w))
        chain.add("d_K<=term1+term2", dk, term1 + terms.term2)

    failed = chain.failures()
    if failed:
        logger.warning(f"{ctx.name}: 证明链有 {len(failed)} 步不成立: {[s.name for s in failed]}")
    else:
        logger.info(f"{ctx.name}: 证明链 {len(chain.steps)} 步全部成立")
    return chain
