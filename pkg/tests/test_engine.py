from fractions import Fraction
from itertools import combinations
from math import prod

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.engine import (
    OutcomeSpace,
    analytic_variances,
    check_degeneracy,
    component_variances,
    conditional_expectation,
    exact_law,
    group_by_value,
    hoeffding_decompose,
    linear_law,
    moment,
    reconstruct,
    rho_squared,
    tabulate,
    variance,
    zeta_transform,
)
from app.manager.settings_manager import settings_manager
from app.manager.study_manager import symmetric_family_spec
from app.model import build_homogeneous_sum, rademacher, three_point
from app.utils.errors import OutOfRange, SpaceTooLarge, SubsetBudgetExceeded
from tests.conftest import BATTERY_SIZE, battery_spec


def _space_table(spec):
    space = OutcomeSpace.from_spec(spec)
    return space, tabulate(space, spec)


def test_x1x2_decomposition(x1x2):
    space, table = _space_table(x1x2)
    components = hoeffding_decompose(space, table)
    assert [c.subset for c in components] == [(0, 1)]
    variances, total = component_variances(components)
    assert total == 1
    assert rho_squared(variances, 2) == 1


def test_half_sum_decomposition(half_sum4):
    space, table = _space_table(half_sum4)
    components = hoeffding_decompose(space, table)
    assert [c.subset for c in components] == [(0,), (1,), (2,), (3,)]
    assert all(c.sigma2 == Fraction(1, 4) for c in components)
    variances, total = component_variances(components)
    assert total == 1
    assert rho_squared(variances, 4) == Fraction(1, 4)


def test_zeta_transform_endpoints(skewed_pairs):
    space, table = _space_table(skewed_pairs)
    cond = zeta_transform(space, table)
    assert len(cond) == 2**4
    assert np.all(cond[-1] == table)
    assert cond[0].size == 1 and cond[0].ravel()[0] == 0


def test_fourth_moments(x1x2, half_sum4):
    assert moment(*_space_table(x1x2), 4) == 1
    assert moment(*_space_table(half_sum4), 4) == Fraction(5, 2)


def test_moment_order_is_bounded(x1x2):
    with pytest.raises(OutOfRange):
        moment(*_space_table(x1x2), 9)


def test_exact_law_x1x2(x1x2):
    law = exact_law(*_space_table(x1x2))
    assert law.atoms() == [(Fraction(-1), Fraction(1, 2)), (Fraction(1), Fraction(1, 2))]


def test_linear_law_matches_enumeration(half_sum4):
    assert linear_law(half_sum4).atoms() == exact_law(*_space_table(half_sum4)).atoms()


def test_linear_law_beyond_enumeration():
    spec = symmetric_family_spec(256, 1, "rademacher")
    assert spec.mode == "rational"
    law = linear_law(spec)
    assert law.size == 257
    assert law.moment(2) == pytest.approx(1.0)
    assert law.moment(4) == pytest.approx(3 - 2 / 256)


def test_symmetric_tabulation_matches_expanded(half_sum4):
    coeffs = {(i,): Fraction(1, 2) for i in range(4)}
    expanded = build_homogeneous_sum(coeffs, [rademacher()] * 4)
    assert np.all(_space_table(half_sum4)[1] == _space_table(expanded)[1])


def test_outcome_guard(monkeypatch, skewed_pairs):
    monkeypatch.setitem(settings_manager.engine, "max_outcomes", 80)
    with pytest.raises(SpaceTooLarge):
        OutcomeSpace.from_spec(skewed_pairs)


def test_subset_transform_guard(monkeypatch, x1x2):
    space, table = _space_table(x1x2)
    # 4 个结果，全部条件期望表共 (1+2)² = 9 个单元
    monkeypatch.setitem(settings_manager.engine, "max_outcomes", 4)
    assert [c.subset for c in hoeffding_decompose(space, table)] == [(0, 1)]
    monkeypatch.setitem(settings_manager.engine, "max_transform_cells", 8)
    with pytest.raises(SpaceTooLarge, match="DEJONG_MAX_TRANSFORM_CELLS"):
        zeta_transform(space, table)


def test_sixteen_rademacher_fit_the_default_guards():
    spec = symmetric_family_spec(16, 2, "rademacher", mode="real")
    space = OutcomeSpace.from_spec(spec)
    assert space.size == 2**16 <= settings_manager.max_outcomes
    assert 3**16 <= settings_manager.max_transform_cells


@pytest.mark.slow
def test_sixteen_rademacher_decompose():
    spec = symmetric_family_spec(16, 1, "rademacher", mode="real")
    components = hoeffding_decompose(*_space_table(spec))
    assert [c.subset for c in components] == [(i,) for i in range(16)]
    assert all(c.sigma2 == pytest.approx(1 / 16) for c in components)


def test_subset_bits_guard(monkeypatch, x1x2):
    space, table = _space_table(x1x2)
    monkeypatch.setitem(settings_manager.engine, "max_subset_bits", 1)
    with pytest.raises(SubsetBudgetExceeded):
        zeta_transform(space, table)


def test_real_values_group_by_quantum():
    keys, groups = group_by_value(np.array([0.1 + 0.2, 0.3, -0.5]), "real")
    assert len(keys) == 2
    assert groups[0] == groups[1] != groups[2]


@given(st.integers(0, BATTERY_SIZE - 1))
@settings(max_examples=40, deadline=None)
def test_decomposition_of_battery(seed):
    spec = battery_spec(seed)
    space, table = _space_table(spec)
    components = hoeffding_decompose(space, table)
    assert np.all(reconstruct(space, components) == table)
    assert check_degeneracy(space, spec, table).degenerate
    variances, total = component_variances(components)
    assert total == variance(space, table)
    if spec.kernels.is_product:
        assert analytic_variances(spec) == (total, rho_squared(variances, spec.n))


def _full(space, component):
    return space.broadcast_subset(component.table, component.subset)


@given(st.integers(0, BATTERY_SIZE - 1))
@settings(max_examples=25, deadline=None)
def test_components_are_orthogonal(seed):
    space, table = _space_table(battery_spec(seed))
    components = hoeffding_decompose(space, table)
    for a, b in combinations(components, 2):
        assert space.expectation(_full(space, a) * _full(space, b)) == 0


@given(st.integers(0, BATTERY_SIZE - 1))
@settings(max_examples=25, deadline=None)
def test_components_vanish_given_any_subset_missing_a_coordinate(seed):
    space, table = _space_table(battery_spec(seed))
    for component in hoeffding_decompose(space, table):
        for size in range(space.n + 1):
            for kept in combinations(range(space.n), size):
                if set(component.subset) <= set(kept):
                    continue
                assert np.all(conditional_expectation(space, _full(space, component), kept) == 0)


def test_not_degenerate_components_are_orthogonal(not_degenerate):
    space, table = _space_table(not_degenerate)
    components = hoeffding_decompose(space, table)
    assert {len(c.subset) for c in components} != {not_degenerate.p}
    for a, b in combinations(components, 2):
        assert space.expectation(_full(space, a) * _full(space, b)) == 0


def test_conditional_expectation_examples(x1x2):
    space = OutcomeSpace.from_spec(x1x2)
    assert np.all(conditional_expectation(space, lambda x1, x2: x1 + x1 * x2, [0]) == space.supports[0])
    assert np.all(conditional_expectation(space, lambda x1, x2: x1 * x2, [0]) == 0)
    product = space.evaluate(lambda x1, x2: x1 * x2)
    assert np.all(conditional_expectation(space, product, [0, 1]) == product)
    assert conditional_expectation(space, product + 1, []) == 1


def test_tabulation_is_the_coefficient_sum():
    coeffs = {(0, 1): Fraction(1, 2), (0, 2): Fraction(-3), (1, 2): Fraction(2, 3)}
    spec = build_homogeneous_sum(coeffs, [rademacher(), three_point(), three_point()])
    space, table = _space_table(spec)
    for index in range(space.size):
        outcome = space.outcome(index)
        x = [space.supports[i][k] for i, k in enumerate(outcome)]
        expected = sum((a * prod(x[i] for i in subset) for subset, a in coeffs.items()), Fraction(0))
        assert table[outcome] == expected
