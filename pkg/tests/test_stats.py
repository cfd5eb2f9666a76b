import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from forgetcurate.errors import DegenerateVariance, EmptySet, IdMismatch, ParameterError, SizeMismatch
from forgetcurate.events import ForgettingProfile
from forgetcurate.stats import (
    SeedRun,
    cross_seed_stdev,
    expected_overlap_curve,
    hypergeom_expected_overlap,
    hypergeom_pmf,
    hypergeom_pmf_total,
    hypergeom_support,
    overlap_curve,
    pearson,
    pearson_table,
    removal_overlap,
)


def run(seed, counts):
    return SeedRun(seed, tuple(ForgettingProfile(i, c, 0, 0, 0) for i, c in enumerate(counts)))


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=50))
def test_pearson_matches_scipy(pairs):
    x, y = map(np.array, zip(*pairs))
    if np.ptp(x) < 1e-6 or np.ptp(y) < 1e-6:
        return
    assert pearson(x, y) == pytest.approx(sps.pearsonr(x, y)[0], abs=1e-9)


def test_pearson_errors():
    with pytest.raises(DegenerateVariance):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ParameterError):
        pearson([1], [2])


def test_inf_substitution_and_stdev():
    a, b = run(0, [None, 1, 2, 0]), run(1, [3, 1, None, 2])
    np.testing.assert_allclose(a.counts(), [50, 1, 2, 0])
    sd = cross_seed_stdev([a, b])
    np.testing.assert_allclose(sd, np.std([[50, 1, 2, 0], [3, 1, 50, 2]], axis=0, ddof=1))
    table = pearson_table([a, b, run(2, [0, 1, 2, 3])])
    assert set(table) == {"0vs1", "0vs2", "1vs2"}
    assert table["0vs1"] == pytest.approx(sps.pearsonr([50, 1, 2, 0], [3, 1, 50, 2])[0])


def test_alignment_and_overlap_errors():
    with pytest.raises(IdMismatch):
        cross_seed_stdev([run(0, [1, 2]), run(1, [1, 2, 3])])
    with pytest.raises(SizeMismatch):
        removal_overlap({1, 2}, {1})
    with pytest.raises(EmptySet):
        removal_overlap(set(), set())
    assert removal_overlap({1, 2, 3, 4}, {3, 4, 5, 6}) == 0.5


def test_overlap_curve_identical_runs():
    counts = [i % 7 for i in range(1000)]
    curves = overlap_curve([run(0, counts), run(1, counts)])
    assert curves["0vs1"] == [1.0] * 9


def test_overlap_curve_empty_cut():
    curves = overlap_curve([run(0, [1] * 50), run(1, [1] * 50)], [0.001, 0.5])
    assert curves["0vs1"] == [None, 1.0]


@given(st.integers(1, 60).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(0, n))))
def test_pmf_matches_scipy(nkm):
    N, K, m = nkm
    for x in hypergeom_support(N, K, m):
        assert hypergeom_pmf(N, K, m, x) == pytest.approx(sps.hypergeom.pmf(x, N, K, m), rel=1e-9, abs=1e-300)


def test_large_population_uses_log_path():
    N, K, m = 131547, 30000, 20000
    xs = range(4300, 4800)
    got = [hypergeom_pmf(N, K, m, x) for x in xs]
    np.testing.assert_allclose(got, sps.hypergeom.pmf(list(xs), N, K, m), rtol=1e-7)
    assert hypergeom_pmf_total(N, K, m) == pytest.approx(1.0, abs=1e-9)


def test_pmf_outside_support_and_errors():
    assert hypergeom_pmf(10, 3, 4, 5) == 0.0
    with pytest.raises(ParameterError):
        hypergeom_pmf(10, 11, 2, 0)
    with pytest.raises(ParameterError):
        hypergeom_expected_overlap(10, 2.5, 3)


def test_expected_overlap():
    count, frac = hypergeom_expected_overlap(1000, 250, 250)
    assert count == 62.5 and frac == 0.25
    # mean of the pmf equals m K / N
    mean = math.fsum(x * hypergeom_pmf(40, 12, 9, x) for x in hypergeom_support(40, 12, 9))
    assert mean == pytest.approx(9 * 12 / 40, abs=1e-12)
    assert expected_overlap_curve(1000, [0.1, 0.25]) == [0.1, 0.25]
