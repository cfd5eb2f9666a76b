import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial.distance import jensenshannon

from forgetcurate.errors import BinMismatch, DataError, EmptyClass, NotADistribution, NotEnoughDistributions
from forgetcurate.likelihood import (
    ConfidenceRecord,
    EmpiricalCDF,
    build_cdf,
    cjsd,
    class_cdfs,
    gcre,
    gcre_from_values,
    jsd_discrete,
    metric_report,
    shannon_entropy,
    sqrt_cjsd,
)

from oracles import cdf_by_counting

unit = st.floats(0.0, 1.0, allow_nan=False)


class TestCDF:
    def test_examples(self):
        assert EmpiricalCDF.from_samples([0.25, 0.75], bins=4).values.tolist() == [0, 0.5, 0.5, 1]
        assert EmpiricalCDF.from_samples([1.0] * 3, bins=5).values.tolist() == [0, 0, 0, 0, 1]

    @given(st.lists(unit, min_size=1, max_size=60), st.integers(1, 50))
    def test_matches_counting_oracle(self, samples, bins):
        got = EmpiricalCDF.from_samples(samples, bins).values
        np.testing.assert_allclose(got, cdf_by_counting(samples, bins), atol=1e-12)
        assert (np.diff(got) >= 0).all() and got[-1] == 1.0

    def test_errors(self):
        with pytest.raises(EmptyClass):
            EmpiricalCDF.from_samples([])
        with pytest.raises(DataError):
            EmpiricalCDF.from_samples([1.2])
        with pytest.raises(DataError):
            ConfidenceRecord(1, 0, -0.1, True)

    def test_build_cdf_uses_correct_records_of_class(self):
        recs = [ConfidenceRecord(1, 2, 0.1, True), ConfidenceRecord(2, 2, 0.9, False),
                ConfidenceRecord(3, 3, 0.9, True)]
        assert build_cdf(recs, 2, bins=2).values.tolist() == [1.0, 1.0]
        with pytest.raises(EmptyClass):
            build_cdf(recs, 5)


class TestGCRE:
    def test_point_mass(self):
        for x in (0.0, 0.3, 1.0):
            assert gcre(EmpiricalCDF.from_samples([x] * 10, bins=100)) == 0.0

    def test_two_point_hand_value(self):
        # F = [0, .5, .5, 1] -> S = [1, .5, .5, 0]; -sum S ln S / 4 = ln 2 / 4
        cdf = EmpiricalCDF.from_samples([0.25, 0.75], bins=4)
        assert gcre(cdf) == pytest.approx(math.log(2) / 4, abs=1e-15)

    def test_uniform_quadrature(self):
        # exact CDF of U(0,1) at right edges converges to 1/4
        b = 20000
        f = np.arange(1, b + 1) / b
        assert gcre_from_values(f) == pytest.approx(0.25, abs=1e-3)

    @given(st.lists(unit, min_size=1, max_size=40))
    def test_bounds(self, samples):
        # -s ln s <= 1/e
        assert 0.0 <= gcre(EmpiricalCDF.from_samples(samples, 30)) <= 1 / math.e + 1e-12


def _cdf(samples, bins=50, superclass=None):
    return EmpiricalCDF.from_samples(samples, bins, superclass)


class TestCJSD:
    def test_identical(self):
        c = _cdf([0.1, 0.4, 0.9])
        assert abs(cjsd([c, c, c])) < 1e-12

    @given(st.lists(st.lists(unit, min_size=1, max_size=20), min_size=2, max_size=6))
    def test_non_negative_and_symmetric(self, groups):
        cdfs = [_cdf(g) for g in groups]
        v = cjsd(cdfs)
        assert v >= -1e-12
        assert cjsd(list(reversed(cdfs))) == pytest.approx(v, abs=1e-15)

    def test_two_point_masses(self):
        # mixture of mass at 0 and mass at 1 has S = 1/2 on every bin but the last
        a, b = _cdf([0.0], 10), _cdf([1.0], 10)
        assert cjsd([a, b]) == pytest.approx(0.9 * 0.5 * math.log(2), abs=1e-12)

    def test_exclude_and_coefficient(self):
        cdfs = [_cdf([0.1], superclass=0), _cdf([0.9], superclass=1), _cdf([0.5], superclass=11)]
        assert cjsd(cdfs, exclude_class=11) == pytest.approx(cjsd(cdfs[:2]))
        # all GCREs are 0, so the coefficient does not matter here
        assert cjsd(cdfs, coefficient=1 / 12) == pytest.approx(cjsd(cdfs))

    def test_errors(self):
        with pytest.raises(NotEnoughDistributions):
            cjsd([_cdf([0.5])])
        with pytest.raises(BinMismatch):
            cjsd([_cdf([0.5], 10), _cdf([0.5], 20)])

    def test_sqrt_clamps(self):
        assert sqrt_cjsd(-1e-15) == 0.0
        assert sqrt_cjsd(0.25) == 0.5


class TestDiscreteJSD:
    @given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8), st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8))
    def test_matches_scipy_for_two(self, p, q):
        n = min(len(p), len(q))
        p = np.array(p[:n]) / sum(p[:n])
        q = np.array(q[:n]) / sum(q[:n])
        assert jsd_discrete([p, q]) == pytest.approx(jensenshannon(p, q) ** 2, abs=1e-12)

    def test_bounds_and_errors(self):
        assert jsd_discrete([[1, 0], [0, 1]]) == pytest.approx(math.log(2))
        assert shannon_entropy([0.5, 0.5]) == pytest.approx(math.log(2))
        with pytest.raises(NotADistribution):
            jsd_discrete([[0.5, 0.6]])
        with pytest.raises(NotADistribution):
            jsd_discrete([[1.0], [0.5, 0.5]])
        with pytest.raises(NotEnoughDistributions):
            jsd_discrete([])


def test_report_skips_empty_classes(caplog):
    rng = np.random.default_rng(0)
    recs = [ConfidenceRecord(i, i % 3, float(rng.uniform()), True) for i in range(90)]
    recs.append(ConfidenceRecord(999, 11, 0.5, True))
    assert len(class_cdfs(recs)) == 4
    report = metric_report(recs, bins=100)
    assert set(report["per_class"]) == {"0", "1", "2", "11"}
    assert report["sqrt_cjsd_no_resolutions"] <= report["sqrt_cjsd_all"]
    assert "superclass 5" in caplog.text
