from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest

from app.engine import OutcomeSpace, moment, tabulate
from app.manager.study_manager import mixed_chaos_spec
from app.mc import SUMMARY_HEADER, RunConfig, draw_w, estimate_fourth_moment, sample_w, substream, summarize, summary_csv
from app.model import build_homogeneous_sum, build_symmetric_sum, rademacher, three_point
from app.utils.errors import OutOfRange

SMALL = RunConfig(seed=7, sample_count=10_000, block_size=1000)


def test_result_does_not_depend_on_workers(skewed_pairs):
    serial = sample_w(skewed_pairs, SMALL)
    threaded = sample_w(skewed_pairs, replace(SMALL, workers=4))
    assert np.array_equal(serial, threaded)


def test_same_seed_same_samples(x1x2):
    assert np.array_equal(sample_w(x1x2, SMALL), sample_w(x1x2, SMALL))
    assert not np.array_equal(sample_w(x1x2, SMALL), sample_w(x1x2, replace(SMALL, seed=8)))


def test_blocks_are_prefix_stable(skewed_pairs):
    longer = sample_w(skewed_pairs, replace(SMALL, sample_count=2500))
    shorter = sample_w(skewed_pairs, replace(SMALL, sample_count=1000))
    assert longer.size == 2500
    assert np.array_equal(longer[:1000], shorter)


def test_substreams_are_independent():
    first = substream(SMALL, 0).random(8)
    assert np.array_equal(first, substream(SMALL, 0).random(8))
    assert not np.array_equal(first, substream(SMALL, 1).random(8))


def test_block_layout():
    assert replace(SMALL, sample_count=2500).blocks == [(0, 1000), (1, 1000), (2, 500)]


@pytest.mark.parametrize(
    "changes",
    [{"sample_count": 0}, {"block_size": 0}, {"delta": 1.0}, {"delta": 0.0}, {"seed": -1}, {"seed": 2**64}],
)
def test_run_config_ranges(changes):
    with pytest.raises(OutOfRange):
        replace(SMALL, **changes)


def test_symmetric_recursion_matches_explicit_subsets():
    law = three_point()
    implicit = build_symmetric_sum(5, 3, law, 1)
    explicit = build_homogeneous_sum({subset: 1 for subset in combinations(range(5), 3)}, [law] * 5)
    assert np.allclose(sample_w(implicit, SMALL), sample_w(explicit, SMALL))


def test_x1x2_kolmogorov_within_band(x1x2):
    summary = summarize(x1x2, RunConfig(seed=11, sample_count=200_000, block_size=65536))
    assert summary.m4 == 1.0
    assert summary.m4_stderr == 0.0
    assert abs(summary.dk_est - 0.341345) <= summary.dk_band
    assert summary.dk_band == pytest.approx(0.00364, abs=1e-5)


@pytest.mark.slow
def test_fourth_moment_estimate_matches_exact():
    spec = mixed_chaos_spec(4)
    space = OutcomeSpace.from_spec(spec)
    exact = moment(space, tabulate(space, spec), 4)
    estimate, stderr = estimate_fourth_moment(spec, RunConfig(seed=5, sample_count=400_000))
    assert abs(estimate - exact) <= 5 * stderr


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize(("fixture", "m4", "dk"), [("x1x2", 1.0, 0.341345), ("half_sum4", 2.5, 0.1875)])
def test_million_samples_match_exact(request, seed, fixture, m4, dk):
    spec = request.getfixturevalue(fixture)
    summary = summarize(spec, RunConfig(seed=seed, sample_count=1_000_000))
    assert summary.dk_band == pytest.approx(0.001628, abs=1e-6)
    assert abs(summary.m4 - m4) <= 5 * summary.m4_stderr
    assert abs(summary.dk_est - dk) <= summary.dk_band


def test_sampler_variables(gaussian_pairs):
    samples = draw_w(gaussian_pairs, seed=3, m=100_000)
    assert samples.size == 100_000
    assert samples.mean() == pytest.approx(0.0, abs=0.02)
    assert samples.var() == pytest.approx(1.0, abs=0.03)


def test_summary_csv(half_sum4):
    summary = summarize(half_sum4, SMALL)
    lines = summary_csv([summary]).splitlines()
    assert lines[0] == ",".join(SUMMARY_HEADER)
    assert lines[1].startswith("7,10000,")
    doc = summary.to_dict()
    assert set(SUMMARY_HEADER) <= set(doc)
    assert float(doc["m4"]) == pytest.approx(2.5, abs=0.25)


def test_rademacher_columns_are_fair():
    spec = build_symmetric_sum(1, 1, rademacher(), 1)
    samples = sample_w(spec, SMALL)
    assert set(np.unique(samples)) == {-1.0, 1.0}
    assert samples.mean() == pytest.approx(0.0, abs=0.04)
