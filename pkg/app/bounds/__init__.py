"""显式界与界-距离比较"""

from .formulas import (
    KAPPA_SYMMETRIC,
    KAPPA_USER,
    BoundInputs,
    ChainBound,
    KappaChoice,
    dk_dw_consistency,
    kappa_policy,
    kolmogorov_bound,
    proof_chain_bound,
    symmetric_bound,
    wasserstein_bound,
)
from .report import (
    CSV_HEADER,
    DOMINATES,
    INCONCLUSIVE,
    VIOLATED,
    BoundReport,
    EmpiricalDistances,
    bound_inputs_from_spec,
    bound_report,
    csv_document,
    verdict,
)

__all__ = [
    "CSV_HEADER",
    "DOMINATES",
    "INCONCLUSIVE",
    "KAPPA_SYMMETRIC",
    "KAPPA_USER",
    "VIOLATED",
    "BoundInputs",
    "BoundReport",
    "ChainBound",
    "EmpiricalDistances",
    "KappaChoice",
    "bound_inputs_from_spec",
    "bound_report",
    "csv_document",
    "dk_dw_consistency",
    "kappa_policy",
    "kolmogorov_bound",
    "proof_chain_bound",
    "symmetric_bound",
    "verdict",
    "wasserstein_bound",
]
