from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from app.engine import OutcomeSpace, check_degeneracy
from app.pair import PairContext, pair_report
from app.pair.statistics import condition_on_w, exchangeability_check, regression_check
from app.pair.theta import (
    conditional_independence,
    difference_statistic,
    lifted_pair,
    taylor_quadratic_bound,
    taylor_slack,
    theta,
)
from tests.conftest import BATTERY_SIZE, battery_spec, is_symmetric_rademacher


def test_x1x2_report(x1x2_ctx):
    report = pair_report(x1x2_ctx, Fraction(4), "paper-symmetric")
    assert report.lam == 1
    assert report.variance == 1
    assert report.fourth_moment == 1
    assert report.rho2 == 1
    assert report.regression_max_residual == 0
    assert report.mean_sq_increment == 2
    assert report.var_cond_sq == 0
    assert report.fourth_increment == 2
    assert report.lemma_slacks == {"lemma1": 2, "lemma2": 6, "lemma3a": 0, "lemma3b": 0}
    assert (report.shzh.term1, report.shzh.term2) == (0, 2)
    assert report.shzh_normalized == 2
    assert report.exact_dk == pytest.approx(0.341345, abs=1e-6)
    assert report.passed


def test_report_document(x1x2_ctx):
    doc = pair_report(x1x2_ctx, Fraction(4), "paper-symmetric").to_dict()
    assert doc["lambda"] == "1"
    assert doc["fourth_increment"] == "2"
    assert doc["fourth_increment_exact"] == "2"
    assert doc["lemma_slacks"] == {"lemma1": "2", "lemma2": "6", "lemma3a": "0", "lemma3b": "0"}
    assert doc["shzh"]["term2"] == "2"
    assert doc["kappa_provenance"] == "paper-symmetric"
    assert doc["passed"] is True


def test_missing_kappa_is_noted(skewed_pairs):
    report = pair_report(PairContext.from_spec(skewed_pairs))
    assert report.lemma_slacks["lemma1"] is None
    assert report.lemma_slacks["lemma2"] is None
    assert any(note.startswith("unverified constant") for note in report.notes)
    assert report.lemma_slacks["lemma3a"] >= 0
    assert report.lemma_slacks["lemma3b"] >= 0


def test_non_degenerate_is_flagged(not_degenerate):
    ctx = PairContext.from_spec(not_degenerate)
    report = pair_report(ctx, Fraction(4))
    codes = {v.split(":")[0] for v in report.violations()}
    assert {"NotDegenerate", "RegressionResidual"} <= codes
    assert not report.passed
    # 可交换性与退化与否无关
    assert exchangeability_check(ctx) == 0


def test_rescaled_spec_uses_scale_free_lemmas(skewed_pairs):
    report = pair_report(PairContext.from_spec(skewed_pairs.rescale(Fraction(5))), Fraction(100))
    assert report.variance == 25
    assert report.mean_sq_increment == 2 * 2 * 25 / Fraction(4)
    assert report.regression_max_residual == 0
    assert all(slack >= 0 for slack in report.lemma_slacks.values())


def test_lifted_pair(x1x2_ctx):
    lifted = lifted_pair(x1x2_ctx, 0)
    assert lifted.n == 3
    assert lifted.lam == Fraction(2, 3)
    assert regression_check(lifted) == 0
    spec = difference_statistic(x1x2_ctx, 0).spec
    assert check_degeneracy(OutcomeSpace.from_spec(spec), spec).degenerate


def test_conditional_independence_x1x2(x1x2_ctx):
    assert conditional_independence(x1x2_ctx, 0, 1) == 0


def test_condition_on_w_x1x2(x1x2_ctx):
    squared = condition_on_w(x1x2_ctx, x1x2_ctx.conditional_on_x(lambda d: d * d))
    assert dict(zip(squared.keys, squared.values)) == {Fraction(-1): 2, Fraction(1): 2}
    ones = condition_on_w(x1x2_ctx, np.full(x1x2_ctx.space.shape, Fraction(1), dtype=object))
    assert all(value == 1 for value in ones.values)


@pytest.mark.parametrize("seed", range(BATTERY_SIZE))
def test_battery_identities(seed):
    spec = battery_spec(seed)
    ctx = PairContext.from_spec(spec)
    kappa = Fraction(2 * spec.p) if is_symmetric_rademacher(seed) else None
    report = pair_report(ctx, kappa)

    assert report.offenders == []
    assert report.regression_max_residual == 0
    assert report.exchangeability == 0
    assert report.theta_mean_max == 0
    assert report.theta_identity_max == 0
    assert report.conditional_independence_max == 0
    assert report.lifted_regression_max == 0
    assert report.expansion_equal
    assert report.mean_sq_increment == Fraction(2 * spec.p, spec.n) * report.variance
    assert report.lemma_slacks["lemma3a"] >= 0
    assert report.lemma_slacks["lemma3b"] >= 0
    assert report.var_cond_sq_given_w <= report.var_cond_sq
    assert report.shzh_normalized >= report.exact_dk - 1e-10
    if kappa is not None:
        assert report.lemma_slacks["lemma1"] >= 0
        assert report.lemma_slacks["lemma2"] >= 0
        assert report.passed, report.violations()



@pytest.mark.parametrize("seed", range(BATTERY_SIZE))
def test_battery_bounds_dominate(study, seed):
    spec = battery_spec(seed)
    report = study.bound(spec, kappa=Fraction(2 * spec.p))
    assert report.kolmogorov_bound >= report.exact_dk
    assert report.wasserstein_bound >= report.exact_dw


def test_dominance_is_checked_after_normalizing(x1x2, x1x2_ctx):
    unit = pair_report(x1x2_ctx, Fraction(4))
    scaled = pair_report(PairContext.from_spec(x1x2.rescale(Fraction(3))), Fraction(4))
    assert scaled.variance == 9
    assert not scaled.normalized
    assert scaled.exact_dk == pytest.approx(0.341345, abs=1e-6)
    assert scaled.shzh_normalized == pytest.approx(unit.shzh_normalized)
    assert scaled.passed, scaled.violations()

    broken = replace(scaled, shzh_normalized=0.0)
    assert any(v.startswith("ShaoZhangDominance") for v in broken.violations())

@given(
    st.fractions(min_value=-20, max_value=20, max_denominator=64),
    st.fractions(min_value=-20, max_value=20, max_denominator=64),
)
@settings(max_examples=500)
@example(Fraction(0), Fraction(1))
@example(Fraction(1), Fraction(-1))
@example(Fraction(-3, 2), Fraction(3, 2))
def test_taylor_quadratic_bound(x, y):
    assert isinstance(theta(x), Fraction)
    assert taylor_slack(x, y) >= 0


def test_taylor_bound_on_grid():
    grid = [Fraction(k, 4) for k in range(-12, 13)]
    assert taylor_quadratic_bound((x, y) for x in grid for y in grid)
