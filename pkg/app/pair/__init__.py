"""可交换对 (W, W′) 及其证明中用到的全部量"""

from .context import PairContext, substitute
from .report import ChainReport, ChainStep, PairReport, pair_report, proof_chain
from .statistics import (
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
from .theta import (
    conditional_independence,
    difference_statistic,
    lifted_pair,
    taylor_quadratic_bound,
    theta,
    theta_product_identity,
)

__all__ = [
    "ChainReport",
    "ChainStep",
    "PairContext",
    "PairReport",
    "condition_on_w",
    "conditional_independence",
    "conditional_squared_increment",
    "difference_statistic",
    "exchangeability_check",
    "hoeffding_of_conditional",
    "increment_fourth",
    "lemma3_energy",
    "lifted_pair",
    "mean_sq_increment",
    "pair_report",
    "proof_chain",
    "regression_check",
    "shzh_terms",
    "substitute",
    "taylor_quadratic_bound",
    "theta",
    "theta_product_identity",
]
