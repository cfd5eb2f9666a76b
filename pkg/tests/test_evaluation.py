import math

import pytest
from hypothesis import given, strategies as st

from forgetcurate.errors import EmptySample, MissingRoundTrip, MissingTruth, ParameterError
from forgetcurate.evaluation import (
    Candidate,
    PredictionSet,
    class_diversity,
    coverage,
    evaluation_report,
    round_trip_accuracy,
    same_product,
    top_n_accuracy,
    wilson_interval,
)


def ps(tid, texts, truth=None, flags=None, classes=None):
    flags = flags or [None] * len(texts)
    classes = classes or [None] * len(texts)
    return PredictionSet(tid, tuple(Candidate(t, f, c) for t, f, c in zip(texts, flags, classes)), truth)


def test_top_n():
    sets = [ps(1, ["A", "B"], "B"), ps(2, ["C"], "C"), ps(3, [], "D")]
    assert top_n_accuracy(sets, n=1) == pytest.approx(1 / 3)
    assert top_n_accuracy(sets, n=2) == pytest.approx(2 / 3)
    assert top_n_accuracy(sets, {1: "A"}, n=1) == pytest.approx(2 / 3)
    with pytest.raises(MissingTruth):
        top_n_accuracy([ps(1, ["A"])])
    with pytest.raises(ParameterError):
        top_n_accuracy(sets, n=0)


@given(st.lists(st.tuples(st.lists(st.sampled_from("ABCDE"), max_size=5, unique=True), st.sampled_from("ABCDE")), min_size=1, max_size=30))
def test_top_n_monotone_and_bounded(data):
    sets = [ps(i, c, t) for i, (c, t) in enumerate(data)]
    accs = [top_n_accuracy(sets, n=n) for n in range(1, 7)]
    assert all(0 <= a <= 1 for a in accs)
    assert accs == sorted(accs)


def test_round_trip_coverage_diversity():
    sets = [
        ps(1, ["A", "B", "C"], flags=[True, False, True], classes=[1, 2, 1]),
        ps(2, ["A"], flags=[False], classes=[3]),
        ps(3, []),
    ]
    # pairs: 2 of 3, 0 of 1, and one failed pair for the empty target
    assert round_trip_accuracy(sets) == pytest.approx(2 / 5)
    assert coverage(sets) == pytest.approx(1 / 3)
    assert class_diversity(sets) == pytest.approx(1 / 3)
    assert class_diversity(sets, covered_only=True) == 1.0
    with pytest.raises(MissingRoundTrip):
        coverage([ps(1, ["A"])])


def test_same_product():
    assert same_product("CCO.[Na+]", "CCO")
    assert not same_product("CCO", "CCN")
    assert not same_product("C[Na", "CCO")


def wilson_oracle(k, n, z):
    # roots of (p - phat)^2 = z^2 p (1 - p) / n
    phat = k / n
    a = 1 + z * z / n
    b = -(2 * phat + z * z / n)
    c = phat * phat
    disc = math.sqrt(b * b - 4 * a * c)
    return (-b - disc) / (2 * a), (-b + disc) / (2 * a)


@given(st.integers(1, 10**6).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))), st.floats(0.5, 3.5))
def test_wilson_quadratic_roots(kn, z):
    k, n = kn
    lo, hi = wilson_interval(k, n, z)
    olo, ohi = wilson_oracle(k, n, z)
    assert lo == pytest.approx(max(0.0, olo), abs=1e-9)
    assert hi == pytest.approx(min(1.0, ohi), abs=1e-9)
    assert 0 <= lo <= k / n <= hi <= 1


def test_wilson_against_statsmodels():
    sm = pytest.importorskip("statsmodels.stats.proportion")
    for k, n in [(0, 10), (3, 10), (10, 10), (90000, 131547)]:
        assert wilson_interval(k, n) == pytest.approx(sm.proportion_confint(k, n, 0.05, "wilson"), abs=1e-4)


def test_wilson_errors():
    with pytest.raises(EmptySample):
        wilson_interval(0, 0)
    with pytest.raises(ParameterError):
        wilson_interval(5, 4)


def test_report_and_json_roundtrip():
    sets = [ps(1, ["A", "B"], "A", [True, True], [1, 2]), ps(2, ["B"], "A", [False], [1])]
    r = evaluation_report(sets, top_n=2)
    assert r["top1"] == 0.5 and r["top2"] == 0.5 and r["n"] == 2
    assert r["wilson"]["lower"] < 0.5 < r["wilson"]["upper"]
    assert r["class_diversity"] == 1.0
    assert [PredictionSet.from_json(s.to_json()) for s in sets] == sets
    r2 = evaluation_report([ps(1, ["A"], "A")])
    assert r2["round_trip"] is None and r2["coverage"] is None
