from fractions import Fraction

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from app.distances import (
    discrete_law,
    dkw_band,
    empirical_kolmogorov,
    empirical_law,
    empirical_wasserstein,
    kolmogorov_exact,
    normal_cdf,
    normal_quantile,
    wasserstein_exact,
)
from app.bounds.formulas import dk_dw_consistency
from app.engine import OutcomeSpace, exact_law, tabulate
from app.utils.errors import OutOfRange

RADEMACHER = discrete_law([Fraction(-1), Fraction(1)], [Fraction(1, 2), Fraction(1, 2)])


def _step_cdf(law, t):
    steps = np.concatenate(([0.0], law.cdf()))
    return steps[np.searchsorted(law.values, t, side="right")]


def test_normal_quantile():
    assert normal_cdf(0.0) == 0.5
    assert normal_quantile(0.8413447461) == pytest.approx(1.0, abs=1e-9)
    assert normal_quantile(1e-30) == -9.0
    with pytest.raises(OutOfRange):
        normal_quantile(1.0)


def test_rademacher_distances():
    assert kolmogorov_exact(RADEMACHER) == pytest.approx(0.341344746, abs=1e-9)
    assert wasserstein_exact(RADEMACHER) == pytest.approx(0.53538, abs=1e-5)


def test_half_sum_kolmogorov(half_sum4):
    space = OutcomeSpace.from_spec(half_sum4)
    law = exact_law(space, tabulate(space, half_sum4))
    # 最大偏差在 0 的左极限处：Φ(0) - F(0-) = 1/2 - 5/16
    assert kolmogorov_exact(law) == pytest.approx(0.1875, abs=1e-12)


def test_kolmogorov_matches_grid_search(skewed_pairs):
    space = OutcomeSpace.from_spec(skewed_pairs)
    law = exact_law(space, tabulate(space, skewed_pairs))
    grid = np.concatenate([np.linspace(-8, 8, 200_001), law.values - 1e-9, law.values])
    gaps = np.abs(_step_cdf(law, grid) - normal_cdf(grid))
    assert gaps.max() == pytest.approx(kolmogorov_exact(law), abs=1e-8)


def test_wasserstein_matches_quadrature(skewed_pairs):
    space = OutcomeSpace.from_spec(skewed_pairs)
    law = exact_law(space, tabulate(space, skewed_pairs))
    grid = np.linspace(-12, 12, 2_400_001)
    integral = trapezoid(np.abs(_step_cdf(law, grid) - normal_cdf(grid)), grid)
    assert wasserstein_exact(law) == pytest.approx(integral, abs=1e-5)


def test_empirical_kolmogorov_matches_scipy():
    samples = np.random.default_rng(3).standard_t(5, size=5000)
    dk, band = empirical_kolmogorov(samples, 0.05)
    assert dk == pytest.approx(scipy.stats.kstest(samples, "norm").statistic, abs=1e-12)
    assert band == pytest.approx(dkw_band(5000, 0.05))


def test_empirical_wasserstein_of_normal_samples():
    samples = np.random.default_rng(11).standard_normal(200_000)
    assert empirical_wasserstein(samples) < 0.01


def test_dkw_band():
    assert dkw_band(10**6, 0.01) == pytest.approx(0.001628, abs=1e-6)
    assert dkw_band(100, 0.01) == pytest.approx(0.1628, abs=1e-4)
    with pytest.raises(OutOfRange):
        dkw_band(0, 0.01)
    with pytest.raises(OutOfRange):
        dkw_band(10, 1.0)


def test_discrete_law_merges_atoms():
    law = discrete_law([1.0, -1.0, 1.0], [0.25, 0.5, 0.25])
    assert law.values.tolist() == [-1.0, 1.0]
    assert law.probs.tolist() == [0.5, 0.5]
    with pytest.raises(ValueError):
        discrete_law([0.0, 1.0], [0.5, 0.25])


def test_empirical_law_counts():
    law = empirical_law(np.array([2.0, -1.0, 2.0, 0.5]))
    assert law.values.tolist() == [-1.0, 0.5, 2.0]
    assert law.probs.tolist() == [0.25, 0.25, 0.5]


@given(
    st.lists(
        st.tuples(st.floats(-6, 6, allow_nan=False), st.integers(1, 20)),
        min_size=1,
        max_size=12,
    )
)
@settings(max_examples=200, deadline=None)
def test_kolmogorov_below_root_wasserstein(atoms):
    values = [v for v, _ in atoms]
    weights = np.array([w for _, w in atoms], dtype=np.float64)
    law = discrete_law(values, (weights / weights.sum()).tolist())
    assert dk_dw_consistency(kolmogorov_exact(law), wasserstein_exact(law))
