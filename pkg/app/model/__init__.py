"""U 统计量规格包"""

from .builders import build_homogeneous_sum, build_symmetric_sum, build_table_spec
from .distributions import FiniteDistribution, SamplerDistribution, rademacher, sparse_three_point, three_point
from .kernels import KernelFamily, ProductKernel, TableKernel
from .loader import dump_spec, load_spec
from .spec import UStatisticSpec
from .validation import Violation, validate_spec

__all__ = [
    "FiniteDistribution",
    "KernelFamily",
    "ProductKernel",
    "SamplerDistribution",
    "TableKernel",
    "UStatisticSpec",
    "Violation",
    "build_homogeneous_sum",
    "build_symmetric_sum",
    "build_table_spec",
    "dump_spec",
    "load_spec",
    "rademacher",
    "sparse_three_point",
    "three_point",
    "validate_spec",
]
