"""有限乘积空间上的精确计算"""

from .hoeffding import (
    DegeneracyResult,
    HoeffdingComponent,
    analytic_variances,
    check_degeneracy,
    component_variances,
    decomposition_document,
    hoeffding_decompose,
    mobius_transform,
    reconstruct,
    rho_squared,
    zeta_transform,
)
from .law import exact_law, group_by_value, group_sums, linear_law
from .moments import moment, variance
from .outcome_space import OutcomeSpace, conditional_expectation, expectation, tabulate
from app.model.tables import canonical_projection

__all__ = [
    "DegeneracyResult",
    "HoeffdingComponent",
    "OutcomeSpace",
    "analytic_variances",
    "canonical_projection",
    "check_degeneracy",
    "component_variances",
    "conditional_expectation",
    "decomposition_document",
    "exact_law",
    "expectation",
    "group_by_value",
    "group_sums",
    "hoeffding_decompose",
    "linear_law",
    "mobius_transform",
    "moment",
    "reconstruct",
    "rho_squared",
    "tabulate",
    "variance",
    "zeta_transform",
]
