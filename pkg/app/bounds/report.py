"""界与距离的比较报告"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

from app.bounds.formulas import (
    BoundInputs,
    KappaChoice,
    dk_dw_consistency,
    kolmogorov_bound,
    proof_chain_bound,
    symmetric_bound,
    wasserstein_bound,
)
from app.engine.hoeffding import analytic_variances, component_variances, hoeffding_decompose, rho_squared
from app.engine.law import linear_law
from app.engine.moments import moment
from app.engine.outcome_space import OutcomeSpace, tabulate
from app.manager.settings_manager import settings_manager
from app.model.spec import UStatisticSpec
from app.utils.errors import SpecError
from app.utils.logger import logger
from app.utils.serialize import format_decimal, scalar_fields

DOMINATES = "dominates"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

CSV_HEADER = ["spec_id", "p", "n", "E4", "rho", "kappa", "bK", "bW", "dK_exact", "dW_exact", "dK_mc", "band", "verdict"]


@dataclass(frozen=True)
class EmpiricalDistances:
    dk: float
    band: float
    dw: Optional[float] = None


@dataclass
class BoundReport:
    spec_id: str
    inputs: BoundInputs
    kolmogorov_bound: float
    wasserstein_bound: float
    symmetric_bound: Optional[float] = None
    pre_simplification_bound: Optional[float] = None
    p_free_bound: Optional[float] = None
    exact_dk: Optional[float] = None
    exact_dw: Optional[float] = None
    empirical: Optional[EmpiricalDistances] = None
    verdicts: dict = field(default_factory=dict)
    dk_dw_consistent: Optional[bool] = None

    @property
    def verdict(self) -> str:
        """总体结论：任一违反即 violated，否则任一不确定即 inconclusive"""
        values = list(self.verdicts.values())
        if VIOLATED in values:
            return VIOLATED
        if not values or INCONCLUSIVE in values:
            return INCONCLUSIVE
        return DOMINATES

    def to_dict(self) -> dict:
        inputs = self.inputs
        doc = {"spec_id": self.spec_id, "p": inputs.p, "n": inputs.n}
        doc.update(scalar_fields("fourth_moment", inputs.fourth_moment))
        doc["rho"] = format_decimal(inputs.rho)
        if inputs.rho2 is not None:
            doc.update(scalar_fields("rho2", inputs.rho2))
        if inputs.kappa is not None:
            doc.update(scalar_fields("kappa", inputs.kappa))
        doc["kappa_provenance"] = inputs.kappa_provenance
        doc["inputs_source"] = inputs.source
        doc["kolmogorov_bound"] = format_decimal(self.kolmogorov_bound)
        doc["symmetric_bound"] = format_decimal(self.symmetric_bound)
        doc["wasserstein_bound"] = format_decimal(self.wasserstein_bound)
        doc["proof_chain"] = {
            "pre_simplification": format_decimal(self.pre_simplification_bound),
            "p_free": format_decimal(self.p_free_bound),
        }
        doc["exact_dk"] = format_decimal(self.exact_dk)
        doc["exact_dw"] = format_decimal(self.exact_dw)
        if self.empirical is not None:
            doc["empirical"] = {
                "dk": format_decimal(self.empirical.dk),
                "band": format_decimal(self.empirical.band),
                "dw": format_decimal(self.empirical.dw),
            }
        doc["dk_dw_consistent"] = self.dk_dw_consistent
        doc["verdicts"] = dict(self.verdicts)
        doc["verdict"] = self.verdict
        return doc

    def csv_row(self) -> list:
        inputs = self.inputs
        return [
            self.spec_id,
            inputs.p,
            inputs.n,
            format_decimal(inputs.fourth_moment),
            format_decimal(inputs.rho),
            format_decimal(inputs.kappa),
            format_decimal(self.kolmogorov_bound),
            format_decimal(self.wasserstein_bound),
            format_decimal(self.exact_dk),
            format_decimal(self.exact_dw),
            format_decimal(self.empirical.dk if self.empirical else None),
            format_decimal(self.empirical.band if self.empirical else None),
            self.verdict,
        ]


def verdict(bound: float, distance: Optional[float], band: float = 0.0, max_band: Optional[float] = None) -> str:
    """bound ≥ distance - band 记为 dominates；带宽超过 bounds.inconclusive_band 时不下结论"""
    max_band = settings_manager.inconclusive_band if max_band is None else max_band
    if distance is None or band > max_band:
        return INCONCLUSIVE
    if bound >= distance - band - settings_manager.eps_num:
        return DOMINATES
    return VIOLATED


def bound_report(
    inputs: BoundInputs,
    spec_id: str,
    exact_dk: Optional[float] = None,
    exact_dw: Optional[float] = None,
    empirical: Optional[EmpiricalDistances] = None,
) -> BoundReport:
    """计算三个界并与精确或经验距离比较

    Raises:
        KappaUnknown: inputs 中没有 κ
    """
    b_k = kolmogorov_bound(inputs)
    b_w = wasserstein_bound(inputs)
    b_s = symmetric_bound(inputs.fourth_moment, inputs.p, inputs.n) if inputs.symmetric else None
    chain = proof_chain_bound(inputs)
    report = BoundReport(spec_id, inputs, b_k, b_w, b_s, chain.pre_simplification, chain.p_free, exact_dk, exact_dw, empirical)

    if exact_dk is not None:
        dk, dk_band = exact_dk, 0.0
    elif empirical is not None:
        dk, dk_band = empirical.dk, empirical.band
    else:
        dk, dk_band = None, 0.0
    if exact_dw is not None:
        dw, dw_band = exact_dw, 0.0
    elif empirical is not None and empirical.dw is not None:
        dw, dw_band = empirical.dw, empirical.band
    else:
        dw, dw_band = None, 0.0

    report.verdicts["kolmogorov"] = verdict(b_k, dk, dk_band)
    if b_s is not None:
        report.verdicts["symmetric"] = verdict(b_s, dk, dk_band)
    report.verdicts["wasserstein"] = verdict(b_w, dw, dw_band)
    if exact_dk is not None and exact_dw is not None:
        report.dk_dw_consistent = dk_dw_consistency(exact_dk, exact_dw)

    level = logger.warning if report.verdict != DOMINATES else logger.info
    level(f"{spec_id}: bK={b_k:.6g}, bW={b_w:.6g}, dK={dk}, dW={dw}, 结论 {report.verdict}")
    return report


def _close_to(value, target, spec: UStatisticSpec) -> bool:
    if spec.mode == "rational":
        return value == target
    return abs(float(value) - target) <= settings_manager.eps_num


def _normalized(fourth_moment, rho2, variance, spec: UStatisticSpec):
    if _close_to(variance, 1, spec):
        return fourth_moment, rho2
    logger.warning(f"{spec.label()} 的方差为 {variance}，按 W/√Var(W) 归一化后计算界")
    if _close_to(variance, 0, spec):
        raise SpecError(f"{spec.label()} 的方差为 0，无法归一化")
    return fourth_moment / (variance * variance), rho2 / variance


def bound_inputs_from_spec(
    spec: UStatisticSpec,
    kappa: Optional[KappaChoice] = None,
    fourth_moment=None,
    space: Optional[OutcomeSpace] = None,
    table=None,
) -> BoundInputs:
    """由规格求 E[W⁴] 与 ρ_n

    ρ² 优先用乘积核的解析式，其次用枚举分解，最后用规格中声明的 rho2；
    E[W⁴] 优先用调用方给出的值（蒙特卡洛），其次枚举，p = 1 时用卷积。

    Raises:
        SpecError: 无法确定 ρ² 或 E[W⁴]
    """
    enumerable = spec.is_finite and spec.outcome_count() <= settings_manager.max_outcomes
    source = "exact"
    variance = None
    if spec.kernels.is_product:
        variance, rho2 = analytic_variances(spec)
        source = "analytic"
    elif enumerable:
        space = space or OutcomeSpace.from_spec(spec)
        table = tabulate(space, spec) if table is None else table
        variances, variance = component_variances(hoeffding_decompose(space, table))
        rho2 = rho_squared(variances, spec.n)
    elif spec.rho2 is not None:
        rho2 = spec.rho2
        source = "declared"
    else:
        raise SpecError(f"{spec.label()} 无法枚举，且没有声明 rho2")

    if fourth_moment is not None:
        source = "mc" if source == "declared" else source
    elif enumerable:
        space = space or OutcomeSpace.from_spec(spec)
        table = tabulate(space, spec) if table is None else table
        fourth_moment = moment(space, table, 4)
        source = "exact"
    elif spec.p == 1 and spec.is_finite and spec.kernels.is_product:
        law = linear_law(spec)
        fourth_moment = sum((v**4 * p for v, p in law.atoms()), 0 * law.atoms()[0][1])
    else:
        raise SpecError(f"{spec.label()} 无法枚举，需要蒙特卡洛估计 E[W⁴]")

    if variance is not None and source != "declared":
        fourth_moment, rho2 = _normalized(fourth_moment, rho2, variance, spec)
    return BoundInputs(
        fourth_moment=fourth_moment,
        rho=math.sqrt(max(float(rho2), 0.0)),
        kappa=kappa.value if kappa else None,
        p=spec.p,
        n=spec.n,
        symmetric=spec.symmetric,
        rho2=rho2,
        source=source,
        kappa_provenance=kappa.provenance if kappa else None,
    )


def csv_document(reports: list[BoundReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        writer.writerow(report.csv_row())
    return buffer.getvalue()
