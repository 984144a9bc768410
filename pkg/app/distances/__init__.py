"""到标准正态分布的距离"""

from .empirical import dkw_band, empirical_kolmogorov, empirical_wasserstein
from .exact import kolmogorov_exact, wasserstein_error_budget, wasserstein_exact
from .law import DiscreteLaw, discrete_law, empirical_law
from .normal import NormalEval, normal_cdf, normal_pdf, normal_quantile

__all__ = [
    "DiscreteLaw",
    "NormalEval",
    "discrete_law",
    "dkw_band",
    "empirical_kolmogorov",
    "empirical_law",
    "empirical_wasserstein",
    "kolmogorov_exact",
    "normal_cdf",
    "normal_pdf",
    "normal_quantile",
    "wasserstein_error_budget",
    "wasserstein_exact",
]
