"""研究管理器，负责把规格交给各个计算模块并组装报告

CLI 与 HTTP 服务共用这一层，两者的行为因此保持一致。
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, isqrt
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import yaml

from app.bounds.formulas import KAPPA_SYMMETRIC, KAPPA_USER, BoundInputs, dk_dw_consistency, kappa_policy
from app.bounds.report import CSV_HEADER, BoundReport, EmpiricalDistances, bound_inputs_from_spec, bound_report
from app.distances.exact import kolmogorov_exact, wasserstein_exact
from app.distances.law import DiscreteLaw
from app.engine.hoeffding import component_variances, decomposition_document, hoeffding_decompose, rho_squared
from app.engine.law import exact_law, linear_law
from app.engine.moments import variance
from app.engine.outcome_space import OutcomeSpace, tabulate
from app.manager.settings_manager import settings_manager
from app.mc.estimates import SampleSummary, estimate_fourth_moment, summarize
from app.mc.sampler import RunConfig, sample_w
from app.model.builders import build_homogeneous_sum, build_symmetric_sum
from app.model.distributions import NAMED_LAWS
from app.model.loader import load_spec
from app.model.scalar import Mode, parse_scalar
from app.model.spec import UStatisticSpec
from app.pair.context import PairContext
from app.pair.report import pair_report, proof_chain
from app.utils.errors import DeJongError, InvalidKappa, OutOfRange, SpecError
from app.utils.logger import logger
from app.utils.serialize import format_decimal

FAMILY_KINDS = ("symmetric", "linear", "mixed-chaos")


@dataclass(frozen=True)
class DistanceResult:
    """W（归一化后）到 N(0,1) 的距离"""

    spec_id: str
    source: str
    dk: float
    dw: Optional[float]
    band: float = 0.0
    atoms: Optional[int] = None

    def to_dict(self) -> dict:
        doc = {
            "spec_id": self.spec_id,
            "source": self.source,
            "dk": format_decimal(self.dk),
            "dw": format_decimal(self.dw),
            "dk_band": format_decimal(self.band),
            "atoms": self.atoms,
        }
        if self.source != "mc":
            doc["dw_error_budget"] = format_decimal(0.0)
        if self.dw is not None:
            doc["dk_dw_consistent"] = dk_dw_consistency(self.dk, self.dw)
        return doc


@dataclass(frozen=True)
class SweepFailure:
    spec_id: str
    p: int
    n: int
    reason: str

    def csv_row(self) -> list:
        return [self.spec_id, self.p, self.n] + [""] * (len(CSV_HEADER) - 4) + [f"error:{self.reason}"]


@dataclass
class SweepResult:
    """按族内顺序排列的成员结果，失败的成员也占一行"""

    entries: list = field(default_factory=list)

    @property
    def reports(self) -> list[BoundReport]:
        return [e for e in self.entries if isinstance(e, BoundReport)]

    @property
    def failures(self) -> list[SweepFailure]:
        return [e for e in self.entries if isinstance(e, SweepFailure)]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for entry in self.entries:
            writer.writerow(entry.csv_row())
        return buffer.getvalue()


def _normalized_law(law: DiscreteLaw, var: float, label: str) -> DiscreteLaw:
    if abs(var - 1.0) <= settings_manager.eps_num:
        return law
    if var <= 0:
        raise SpecError(f"{label} 的方差为 0，无法归一化")
    logger.warning(f"{label} 的方差为 {var:.6g}，距离按 W/√Var(W) 计算")
    return DiscreteLaw(law.values / math.sqrt(var), law.probs)


class StudyManager:
    """研究管理器，负责加载规格、选择精确或蒙特卡洛路径并输出报告"""

    def __init__(self):
        """初始化研究管理器"""
        # 最近一次使用的 (规格, 结果空间, 取值表)，同一规格连续调用时复用
        self._cached: Optional[tuple] = None
        self._context_cache: Optional[tuple] = None

    def load(self, source: Union[str, Path, dict]) -> UStatisticSpec:
        return load_spec(source)

    def enumerable(self, spec: UStatisticSpec) -> bool:
        return spec.is_finite and spec.outcome_count() <= settings_manager.max_outcomes

    def _context(self, spec: UStatisticSpec) -> PairContext:
        if self._context_cache is not None and self._context_cache[0] is spec:
            return self._context_cache[1]
        _, table = self._space_and_table(spec)
        ctx = PairContext.from_spec(spec, table)
        self._context_cache = (spec, ctx)
        return ctx

    def _space_and_table(self, spec: UStatisticSpec) -> tuple[OutcomeSpace, np.ndarray]:
        if self._cached is not None and self._cached[0] is spec:
            return self._cached[1], self._cached[2]
        space = OutcomeSpace.from_spec(spec)
        table = tabulate(space, spec)
        self._cached = (spec, space, table)
        return space, table

    def decompose(self, spec: UStatisticSpec) -> Dict[str, Any]:
        """Hoeffding 分解导出

        Raises:
            UnsupportedVariable / SpaceTooLarge / SubsetBudgetExceeded
        """
        space, table = self._space_and_table(spec)
        components = hoeffding_decompose(space, table)
        variances, var = component_variances(components)
        doc = {"spec_id": spec.label(), "n": spec.n, "p": spec.p, "mode": spec.mode}
        doc.update(decomposition_document(components, var, rho_squared(variances, spec.n)))
        offenders = [c.subset for c in components if len(c.subset) != spec.p]
        doc["degenerate"] = not offenders
        doc["offenders"] = [[j + 1 for j in s] for s in offenders]
        logger.info(f"{spec.label()}: 分解完成, 非零分量 {len(components)} 个, 退化={not offenders}")
        return doc

    def verify(self, spec: UStatisticSpec, kappa=None, chain: bool = False) -> tuple[Dict[str, Any], bool]:
        """可交换对核查，chain 为 True 时同时核查证明链

        Returns:
            tuple[Dict[str, Any], bool]: (报告, 是否全部通过)

        Raises:
            KappaUnknown: 非对称规格且没有提供 κ
        """
        choice = kappa_policy(spec, kappa)
        ctx = self._context(spec)
        report = pair_report(ctx, choice.value, choice.provenance)
        doc = report.to_dict()
        passed = report.passed
        if chain:
            chain_report = proof_chain(ctx, choice.value, report.rho2)
            doc["proof_chain"] = chain_report.to_dict()
            passed = passed and chain_report.passed
        doc["passed"] = passed
        return doc, passed

    def distances(
        self, spec: UStatisticSpec, mc: Optional[int] = None, seed: Optional[int] = None, delta: Optional[float] = None
    ) -> Optional[DistanceResult]:
        """精确距离优先（枚举，或一阶乘积核的卷积），否则在给定 mc 时用样本估计

        Returns:
            Optional[DistanceResult]: 无法计算时为 None
        """
        law = None
        source = "exact"
        if self.enumerable(spec):
            space, table = self._space_and_table(spec)
            law = _normalized_law(exact_law(space, table), float(variance(space, table)), spec.label())
        elif spec.is_finite and spec.p == 1 and spec.kernels.is_product:
            law = linear_law(spec)
            source = "linear"
            law = _normalized_law(law, law.moment(2) - law.moment(1) ** 2, spec.label())
        if law is not None:
            return DistanceResult(spec.label(), source, kolmogorov_exact(law), wasserstein_exact(law), 0.0, law.size)
        if mc is None:
            logger.warning(f"{spec.label()}: 无法精确计算距离，且没有指定 --mc")
            return None
        summary = self.simulate(spec, mc, seed, delta)
        return DistanceResult(spec.label(), "mc", summary.dk_est, summary.dw_est, summary.dk_band)

    def simulate(
        self,
        spec: UStatisticSpec,
        m: Optional[int] = None,
        seed: Optional[int] = None,
        delta: Optional[float] = None,
        workers: Optional[int] = None,
    ) -> SampleSummary:
        config = RunConfig.from_settings(seed=seed, sample_count=m, delta=delta, workers=workers)
        return summarize(spec, config)

    def bound(
        self,
        spec: UStatisticSpec,
        kappa=None,
        mc: Optional[int] = None,
        seed: Optional[int] = None,
        delta: Optional[float] = None,
    ) -> BoundReport:
        """三个界与精确或经验距离的比较

        Raises:
            KappaUnknown: 非对称规格且没有提供 κ
            SpecError: 无法得到 E[W⁴] 或 ρ²
        """
        choice = kappa_policy(spec, kappa)
        exact = self.distances(spec)
        empirical = None
        fourth_moment = None
        if mc is not None:
            config = RunConfig.from_settings(seed=seed, sample_count=mc, delta=delta)
            samples = sample_w(spec, config)
            summary = summarize(spec, config, samples)
            empirical = EmpiricalDistances(summary.dk_est, summary.dk_band, summary.dw_est)
            if not self.enumerable(spec) and not (spec.is_finite and spec.p == 1 and spec.kernels.is_product):
                fourth_moment, _ = estimate_fourth_moment(spec, config, samples)
        space = table = None
        if self.enumerable(spec):
            space, table = self._space_and_table(spec)
        inputs = bound_inputs_from_spec(spec, choice, fourth_moment, space, table)
        return bound_report(
            inputs,
            spec.label(),
            exact.dk if exact else None,
            exact.dw if exact else None,
            empirical,
        )

    def bound_from_inputs(
        self, fourth_moment, rho, kappa, p: int, n: int, symmetric: bool = False
    ) -> BoundReport:
        """不需要规格，直接由 (E[W⁴], ρ, κ, p, n) 计算界

        Raises:
            InvalidKappa / OutOfRange: 输入不合法
        """
        try:
            e4 = parse_scalar(fourth_moment, "rational")
            kappa_value = parse_scalar(kappa, "rational") if kappa is not None else None
            rho_value = float(parse_scalar(rho, "real"))
        except ValueError as e:
            raise OutOfRange(f"无法解析输入: {e}") from e
        if kappa_value is None and symmetric:
            kappa_value = Fraction(2 * p)
        if kappa_value is not None and kappa_value <= 0:
            raise InvalidKappa(f"κ={kappa_value} 必须为正")
        inputs = BoundInputs(
            fourth_moment=e4,
            rho=rho_value,
            kappa=kappa_value,
            p=p,
            n=n,
            symmetric=symmetric,
            source="inputs",
            kappa_provenance=KAPPA_USER if kappa is not None else (KAPPA_SYMMETRIC if symmetric else None),
        )
        return bound_report(inputs, f"inputs-p{p}-n{n}")

    def family_specs(self, family: Dict[str, Any]) -> list[tuple[str, int, int, Any]]:
        """展开族文件，返回 (spec_id, p, n, 规格或构造失败原因)"""
        kind = family.get("kind")
        if kind not in FAMILY_KINDS:
            raise SpecError(f"未知的族类型 {kind!r}，可选 {list(FAMILY_KINDS)}")
        name = family.get("name", kind)
        members = []
        if kind == "mixed-chaos":
            for m in family.get("m", []):
                spec_id = f"{name}-m{m}"
                try:
                    members.append((spec_id, 2, int(m) + 2, mixed_chaos_spec(int(m), spec_id)))
                except DeJongError as e:
                    members.append((spec_id, 2, int(m) + 2, e))
            return members
        p = int(family.get("p", 1))
        if kind == "linear" and p != 1:
            raise SpecError("linear 族要求 p = 1")
        law_name = family.get("law", "rademacher")
        if law_name not in NAMED_LAWS:
            raise SpecError(f"未知的分布 '{law_name}'，可选 {sorted(NAMED_LAWS)}")
        for n in family.get("n", []):
            n = int(n)
            spec_id = f"{name}-n{n}"
            try:
                members.append((spec_id, p, n, symmetric_family_spec(n, p, law_name, family.get("mode", "auto"), spec_id)))
            except DeJongError as e:
                members.append((spec_id, p, n, e))
        return members

    def sweep(self, family: Union[str, Path, Dict[str, Any]]) -> SweepResult:
        """逐个成员计算界与距离，单个成员失败只记录，不中断

        Raises:
            SpecError: 族文件本身无法解析
        """
        if not isinstance(family, dict):
            family = load_family(family)
        kappa = family.get("kappa")
        mc = family.get("mc")
        seed = family.get("seed")
        result = SweepResult()
        for spec_id, p, n, spec in self.family_specs(family):
            if isinstance(spec, DeJongError):
                logger.error(f"{spec_id}: 构造失败 {spec}")
                result.entries.append(SweepFailure(spec_id, p, n, type(spec).__name__))
                continue
            try:
                result.entries.append(self.bound(spec, kappa, mc, seed))
            except (DeJongError, ValueError) as e:
                logger.error(f"{spec_id}: 计算失败 {e}")
                result.entries.append(SweepFailure(spec_id, p, n, type(e).__name__))
        logger.info(f"族 {family.get('name', family.get('kind'))}: 成功 {len(result.reports)} 个, 失败 {len(result.failures)} 个")
        return result


def load_family(path: Union[str, Path]) -> Dict[str, Any]:
    """读取 YAML 或 JSON 族文件

    Raises:
        SpecError: 无法读取或解析
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"无法读取族文件 {path}: {e}") from e
    try:
        family = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise SpecError(f"族文件 {path} 解析失败: {e}") from e
    if not isinstance(family, dict):
        raise SpecError(f"族文件 {path} 必须是映射")
    return family


def symmetric_family_spec(n: int, p: int, law_name: str, mode: str = "auto", name: Optional[str] = None) -> UStatisticSpec:
    """系数为 1/√C(n, p) 的对称齐次和；auto 模式下 C(n, p) 为完全平方数时用有理模式"""
    count = comb(n, p)
    if mode == "auto":
        mode = "rational" if isqrt(count) ** 2 == count else "real"
    if mode not in ("rational", "real"):
        raise SpecError(f"未知模式 '{mode}'")
    coefficient: Any = Fraction(1, isqrt(count)) if mode == "rational" else 1.0 / math.sqrt(count)
    if mode == "rational" and isqrt(count) ** 2 != count:
        raise SpecError(f"C({n}, {p}) = {count} 不是完全平方数，系数不是有理数")
    return build_symmetric_sum(n, p, NAMED_LAWS[law_name](mode), coefficient, mode, name)


def mixed_chaos_spec(m: int, name: Optional[str] = None) -> UStatisticSpec:
    """W = a·Q_m + b·X_{m+1}X_{m+2}

    Q_m 是 m 个 Rademacher 变量的归一化二阶对称和，极限为 (Z² - 1)/√2，四阶矩趋于 15；
    取 a² = 1/(1 + √6)、b² = √6/(1 + √6)，使 12a⁴ = 2b⁴，于是 E[W⁴] → 3，而 ρ² ≥ b² 不趋于 0。
    """
    if m < 2:
        raise OutOfRange(f"m={m} 至少为 2")
    mode: Mode = "real"
    root6 = math.sqrt(6.0)
    a = math.sqrt(1.0 / (1.0 + root6))
    b = math.sqrt(root6 / (1.0 + root6))
    scale = a / math.sqrt(comb(m, 2))
    coeffs = {subset: scale for subset in combinations(range(m), 2)}
    coeffs[(m, m + 1)] = b
    law = NAMED_LAWS["rademacher"](mode)
    return build_homogeneous_sum(coeffs, [law] * (m + 2), mode, False, name)


# 创建全局 StudyManager 实例
study_manager = StudyManager()
