import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from forgetcurate.errors import DataError, ShapeError
from forgetcurate.events import CorrectnessMatrix, MatrixKind, compute_profiles, profile_histogram

from oracles import enumerate_transitions


def matrices(max_rows=20, max_cols=20):
    return st.tuples(st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
        lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))
    )


@given(matrices())
def test_profiles_match_enumerator(values):
    m = CorrectnessMatrix(tuple(range(100, 100 + len(values))), values)
    for p, row in zip(compute_profiles(m), values.tolist()):
        assert (p.n_forgetting, p.n_learning) == enumerate_transitions(row)
        assert p.final_state == row[-1] and p.first_state == row[0]


@given(matrices())
def test_event_balance(values):
    # learning minus forgetting equals final minus initial state
    for p in compute_profiles(CorrectnessMatrix(tuple(range(len(values))), values)):
        forgets = p.n_forgetting or 0
        assert p.n_learning - forgets == p.final_state - p.first_state


def test_hand_cases():
    rows = [[0, 0, 0], [1, 1, 1], [0, 1, 0, ], [1, 0, 1]]
    p = compute_profiles(CorrectnessMatrix((1, 2, 3, 4), rows))
    assert [x.n_forgetting for x in p] == [None, 0, 1, 1]
    assert p[0].never_learnt and p[1].never_forgotten and p[3].learnt_ever
    assert p[0].forgetting_or(50) == 50


def test_single_epoch_has_no_events():
    p = compute_profiles(CorrectnessMatrix((1, 2), [[1], [0]]))
    assert [x.n_forgetting for x in p] == [0, None]


@pytest.mark.parametrize(
    "values,exc",
    [([[0, 1], [1]], ShapeError), ([[0, 2]], DataError), (np.zeros(3), ShapeError)],
)
def test_validation(values, exc):
    ids = tuple(range(len(values)))
    with pytest.raises(exc):
        CorrectnessMatrix(ids, values)


def test_duplicate_ids_and_readonly():
    with pytest.raises(DataError):
        CorrectnessMatrix((1, 1), [[0], [1]])
    m = CorrectnessMatrix((1, 2), [[0, 1], [1, 1]], "round_trip")
    assert m.kind is MatrixKind.ROUND_TRIP
    with pytest.raises(ValueError):
        m.values[0, 0] = 1
    assert m.subset([2]).values.tolist() == [[1, 1]]


def test_histogram():
    rows = [[0, 0], [1, 0], [1, 1], [0, 1], [1, 0]]
    profiles = compute_profiles(CorrectnessMatrix(range(5), rows))
    h = profile_histogram(profiles)
    assert h.counts == {0: 2, 1: 2}
    assert h.n_total == 5 and h.n_learnt == 4
    assert h.never_learnt_fraction == pytest.approx(0.2)
    assert h.percentages() == {0: 50.0, 1: 50.0}
    per = profile_histogram(profiles, {0: 0, 1: 0, 2: 3, 3: 3, 4: 3})
    assert per[0].n_total == 2 and per[3].counts == {0: 2, 1: 1}
    with pytest.raises(DataError):
        profile_histogram([])


def test_histogram_worked_example():
    profiles = compute_profiles(CorrectnessMatrix((1, 2, 3), [[0, 1, 1], [0, 0, 0], [0, 1, 0]]))
    h = profile_histogram(profiles)
    assert h.counts == {0: 1, 1: 1}
    assert h.learnt_fraction == pytest.approx(2 / 3) and h.never_learnt_fraction == pytest.approx(1 / 3)
    empty = profile_histogram(compute_profiles(CorrectnessMatrix((1, 2), [[0, 0], [0, 0]])))
    assert empty.counts == {} and empty.never_learnt_fraction == 1.0 and empty.percentages() == {}


@given(matrices(max_rows=40), st.integers(0, 2**16))
def test_per_class_histograms_sum_to_global(values, seed):
    ids = tuple(range(len(values)))
    profiles = compute_profiles(CorrectnessMatrix(ids, values))
    classes = dict(zip(ids, np.random.default_rng(seed).integers(0, 2, len(ids)).tolist()))
    per = profile_histogram(profiles, classes)
    total = profile_histogram(profiles)
    merged = {}
    for h in per.values():
        for k, v in h.counts.items():
            merged[k] = merged.get(k, 0) + v
    assert merged == total.counts
    assert sum(h.n_total for h in per.values()) == total.n_total
