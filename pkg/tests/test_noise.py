import pytest
from hypothesis import given, strategies as st

from forgetcurate.errors import DataError, IdMismatch
from forgetcurate.events import ForgettingProfile
from forgetcurate.noise import noise_recall, shuffle_products, topk_substitute
from forgetcurate.synthetic import generate_reactions

RECORDS = generate_reactions(300, 11)


@given(st.integers(0, 2**32 - 1))
def test_shuffle_is_a_permutation_of_products(seed):
    out, noisy = shuffle_products(RECORDS, seed)
    assert sorted(r.product for r in out) == sorted(r.product for r in RECORDS)
    changed = {a.id for a, b in zip(out, RECORDS) if a.product != b.product}
    assert changed == noisy
    assert all(a.precursors == b.precursors and a.id == b.id for a, b in zip(out, RECORDS))


def test_shuffle_subset_and_determinism():
    subset = [r.id for r in RECORDS[:40]]
    out, noisy = shuffle_products(RECORDS, 3, subset)
    assert noisy <= set(subset)
    assert out[40:] == RECORDS[40:]
    assert shuffle_products(RECORDS, 3, subset) == (out, noisy)
    with pytest.raises(IdMismatch):
        shuffle_products(RECORDS, 3, [10**9])
    with pytest.raises(DataError):
        shuffle_products(RECORDS[:1], 0)


def test_topk_substitute():
    recs = RECORDS[:4]
    ranked = {
        recs[0].id: ["X", "Y", "CCCC"],
        recs[1].id: ["X"],
        recs[2].id: ["X", "Y", recs[2].product],
    }
    out, noisy, report = topk_substitute(recs, ranked, k=3)
    assert noisy == {recs[0].id}
    assert out[0].product == "CCCC" and out[1:] == recs[1:]
    assert report.to_json() == {"substituted": 1, "unchanged": 1, "insufficient_candidates": 1}


def test_noise_recall_buckets_are_nested():
    counts = [None, None, 7, 5, 4, 1, 0, 0]
    profiles = [ForgettingProfile(i, c, 0, 0, 0) for i, c in enumerate(counts)]
    r = noise_recall(profiles, range(8))
    assert (r.never_learnt, r.at_least_5, r.at_least_1, r.n) == (2 / 8, 4 / 8, 6 / 8, 8)
    assert noise_recall(profiles, []).n == 0
    with pytest.raises(IdMismatch):
        noise_recall(profiles, [99])
