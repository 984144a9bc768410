import copy
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from app.engine.hoeffding import check_degeneracy
from app.engine.moments import variance
from app.engine.outcome_space import OutcomeSpace, tabulate
from app.model import build_homogeneous_sum, build_table_spec, dump_spec, load_spec, rademacher, three_point, validate_spec
from app.model.distributions import sparse_three_point
from app.model.scalar import parse_scalar
from app.utils.errors import MixedOrder, NonCentered, NonUnitVariance, SpecError

RADEMACHER_ATOMS = [{"v": "-1", "prob": "1/2"}, {"v": "1", "prob": "1/2"}]

BASE_DOC = {
    "n": 2,
    "p": 2,
    "mode": "rational",
    "variables": [{"atoms": RADEMACHER_ATOMS}, {"atoms": RADEMACHER_ATOMS}],
    "kernels": {"type": "homogeneous", "coeffs": [{"subset": [1, 2], "a": "1"}]},
}


def _doc(**changes):
    doc = copy.deepcopy(BASE_DOC)
    doc.update(changes)
    return doc


def test_load_x1x2(x1x2):
    assert (x1x2.n, x1x2.p, x1x2.mode) == (2, 2, "rational")
    assert x1x2.symmetric
    assert x1x2.name == "x1x2"
    assert x1x2.kernels.coefficients(2) == {(0, 1): Fraction(1)}


def test_symmetric_kernel_stays_implicit(half_sum4):
    assert half_sum4.kernels.uniform == Fraction(1, 2)
    assert half_sum4.kernels.entries == {}
    assert half_sum4.symmetric
    assert half_sum4.kernels.subset_count(4) == 4


def test_dump_then_load_keeps_structure(skewed_pairs):
    again = load_spec(dump_spec(skewed_pairs))
    assert again.variables == skewed_pairs.variables
    assert again.kernels.coefficients(4) == skewed_pairs.kernels.coefficients(4)
    assert again.symmetric is False


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({k: v for k, v in BASE_DOC.items() if k != "n"}, "必要字段"),
        (_doc(p=3), "OrderExceedsN"),
        (_doc(kernels={"type": "homogeneous", "coeffs": [{"subset": [1, 3], "a": "1"}]}), "超出"),
        (_doc(kernels={"type": "homogeneous", "coeffs": [{"subset": [2, 1], "a": "1"}]}), "升序"),
        (_doc(variables=[{"atoms": RADEMACHER_ATOMS}]), "VariableCountMismatch"),
        (_doc(variables={"iid": {"law": "cauchy"}}), "未知的分布"),
        (_doc(kernels={"type": "spline"}), "未知的核类型"),
        (_doc(mode="complex"), "未知模式"),
    ],
)
def test_malformed_documents(doc, fragment):
    with pytest.raises(SpecError, match=fragment):
        load_spec(doc)


def test_probability_sum_is_reported():
    doc = _doc(
        variables=[{"atoms": [{"v": "-1", "prob": "1/2"}, {"v": "1", "prob": "1/4"}]}, {"atoms": RADEMACHER_ATOMS}],
        kernels={"type": "table", "entries": [{"subset": [1, 2], "table": [["1", "-1"], ["-1", "1"]]}]},
    )
    with pytest.raises(SpecError, match="ProbabilitySum"):
        load_spec(doc)


def test_homogeneous_sum_requires_standardized_variables():
    shifted = [{"v": "0", "prob": "1/2"}, {"v": "2", "prob": "1/2"}]
    with pytest.raises(NonCentered):
        load_spec(_doc(variables=[{"atoms": shifted}, {"atoms": RADEMACHER_ATOMS}]))
    wide = [{"v": "-2", "prob": "1/2"}, {"v": "2", "prob": "1/2"}]
    with pytest.raises(NonUnitVariance):
        load_spec(_doc(variables=[{"atoms": RADEMACHER_ATOMS}, {"atoms": wide}]))


def test_mixed_order_is_rejected():
    coeffs = [{"subset": [1], "a": "1"}, {"subset": [1, 2], "a": "1"}]
    with pytest.raises(MixedOrder):
        load_spec(_doc(kernels={"type": "homogeneous", "coeffs": coeffs}))


def test_sampler_needs_real_mode():
    with pytest.raises(SpecError):
        load_spec(_doc(variables={"iid": {"sampler": "normal"}}))


def test_symmetric_flag_is_checked(skewed_pairs):
    codes = [v.code for v in validate_spec(replace(skewed_pairs, symmetric=True))]
    assert codes == ["SymmetricMismatch"]


def test_symmetric_flag_is_detected():
    coeffs = {(0, 1): 2, (0, 2): 2, (1, 2): 2}
    assert build_homogeneous_sum(coeffs, [rademacher()] * 3).symmetric
    coeffs[(1, 2)] = 1
    assert not build_homogeneous_sum(coeffs, [rademacher()] * 3).symmetric


def test_canonicalized_tables_are_degenerate():
    rng = np.random.default_rng(7)
    variables = [three_point(), sparse_three_point(), three_point()]
    tables = {(0, 2): rng.integers(-3, 4, size=(3, 3)).tolist(), (1, 2): rng.integers(-3, 4, size=(3, 3)).tolist()}
    spec = build_table_spec(tables, variables, canonicalize=True)
    assert check_degeneracy(OutcomeSpace.from_spec(spec), spec).degenerate


def test_raw_table_is_not_degenerate(not_degenerate):
    result = check_degeneracy(OutcomeSpace.from_spec(not_degenerate), not_degenerate)
    assert not result.degenerate
    assert result.offenders_one_based() == [[1], [2]]


def test_rescale_multiplies_variance(skewed_pairs):
    def var(spec):
        space = OutcomeSpace.from_spec(spec)
        return variance(space, tabulate(space, spec))

    assert var(skewed_pairs) == 1
    assert var(skewed_pairs.rescale(Fraction(3))) == 9


@pytest.mark.parametrize("law", [rademacher, three_point, sparse_three_point])
def test_named_laws_are_standardized(law):
    dist = law()
    assert dist.mean() == 0
    assert dist.variance() == 1
    assert sum(dist.probs) == 1


def test_sample_index_frequencies():
    dist = three_point()
    index = dist.sample_index(np.random.default_rng(0), 200_000)
    freq = np.bincount(index, minlength=3) / index.size
    assert np.allclose(freq, [1 / 3, 1 / 2, 1 / 6], atol=0.01)


def test_parse_scalar_modes():
    assert parse_scalar("1/3", "rational") == Fraction(1, 3)
    assert parse_scalar("1/3", "real") == pytest.approx(1 / 3)
    assert parse_scalar(0.25, "rational") == Fraction(1, 4)
    with pytest.raises(ValueError):
        parse_scalar(True, "rational")
