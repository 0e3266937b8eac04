import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbpsim import (
    BUILTIN_DRIFTS,
    DriftSpec,
    GapLaw,
    RngSpec,
    StabilityError,
    StationarityBoundError,
    approximant,
    approximant_rates_direct,
    finite_stationary_rates,
    infinite_rates,
    mean_drifts,
    positions_from_gaps,
    sample_gaps,
    stability_check,
    stationarity_bound,
)

ATLAS = BUILTIN_DRIFTS["atlas"]
DRIFTLESS = BUILTIN_DRIFTS["driftless"]
INVERTED = BUILTIN_DRIFTS["inverted-atlas"]


def drift_spec_strategy():
    return st.builds(
        DriftSpec,
        st.lists(st.floats(-3, 3), max_size=6).map(tuple),
        st.floats(-2, 2),
    )


class TestStability:
    def test_atlas_three_particles(self):
        # enumeration oracle: gbar = (1, 1/2, 1/3); both leading means beat 1/3
        gbar = mean_drifts(ATLAS, 3)
        assert all(g > gbar[-1] for g in gbar[:-1])
        assert stability_check(ATLAS, 3) is True

    def test_driftless_is_never_stable(self):
        assert stability_check(DRIFTLESS, 4) is False

    def test_inverted_atlas_two_particles(self):
        gbar = mean_drifts(INVERTED, 2)
        assert not gbar[0] > gbar[1]
        assert stability_check(INVERTED, 2) is False

    @given(drift_spec_strategy(), st.integers(2, 12))
    @settings(max_examples=200, deadline=None)
    def test_equivalent_to_rate_positivity(self, spec, n):
        stable = stability_check(spec, n)
        if stable:
            assert np.all(finite_stationary_rates(spec, n).rates > 0)
        else:
            with pytest.raises(StabilityError):
                finite_stationary_rates(spec, n)


class TestFiniteRates:
    def test_atlas_two_particles(self):
        np.testing.assert_array_equal(finite_stationary_rates(ATLAS, 2).rates, [1.0])

    def test_atlas_three_particles(self):
        np.testing.assert_allclose(
            finite_stationary_rates(ATLAS, 3).rates, [4.0 / 3.0, 2.0 / 3.0], rtol=1e-15
        )

    def test_driftless_reports_first_violation(self):
        with pytest.raises(StabilityError) as err:
            finite_stationary_rates(DRIFTLESS, 3)
        assert err.value.first_violation == 1


class TestInfiniteRates:
    def test_atlas_family(self):
        np.testing.assert_array_equal(infinite_rates(ATLAS, 1.0, 4).rates, [3.0, 4.0, 5.0, 6.0])

    def test_driftless_family(self):
        np.testing.assert_array_equal(infinite_rates(DRIFTLESS, 2.0, 3).rates, [2.0, 4.0, 6.0])

    def test_inverted_atlas_family(self):
        np.testing.assert_array_equal(infinite_rates(INVERTED, 3.0, 3).rates, [1.0, 4.0, 7.0])

    def test_bound_is_reported(self):
        with pytest.raises(StationarityBoundError) as err:
            infinite_rates(INVERTED, 1.0, 5)
        assert err.value.bound == 2.0
        assert "2.0" in str(err.value)

    def test_boundary_value_rejected_without_flag(self):
        with pytest.raises(StationarityBoundError):
            infinite_rates(ATLAS, 0.0, 5)

    def test_degenerate_atlas_is_all_twos(self):
        law = infinite_rates(ATLAS, 0.0, 6, allow_degenerate=True)
        np.testing.assert_array_equal(law.rates, [2.0] * 6)

    def test_degenerate_needs_positive_partial_sums(self):
        with pytest.raises(StationarityBoundError):
            infinite_rates(DRIFTLESS, 0.0, 5, allow_degenerate=True)


class TestApproximant:
    def test_atlas_m2_drifts(self):
        ap = approximant(ATLAS, 1.0, 2)
        assert ap.tail_drift == -1.5
        np.testing.assert_array_equal(ap.drifts, [1.0, 0.0, -1.5, -1.5])
        assert ap.drifts.mean() == -0.5

    def test_atlas_m2_rates(self):
        ap = approximant(ATLAS, 1.0, 2)
        np.testing.assert_array_equal(ap.rates, [3.0, 4.0, 2.0])
        np.testing.assert_allclose(approximant_rates_direct(ap), ap.rates, atol=1e-12)

    def test_smallest_tail_rate_is_positive(self):
        for spec, a, m in [(ATLAS, 0.3, 4), (INVERTED, 2.5, 3), (DRIFTLESS, 0.1, 6)]:
            ap = approximant(spec, a, m)
            gbar_m = mean_drifts(spec, m)[-1]
            expected_last = (2.0 * gbar_m + a) / (m - 1)
            assert ap.rates[-1] == pytest.approx(expected_last, rel=1e-12)
            assert ap.rates[-1] > 0

    def test_drift_balance_and_formula_agreement_randomized(self):
        rng = np.random.default_rng(515151)
        for _ in range(50):
            n0 = int(rng.integers(0, 5))
            spec = DriftSpec(tuple(rng.normal(size=n0)), tail=float(rng.normal() * 0.5))
            a = stationarity_bound(spec) + float(rng.uniform(0.1, 2.0))
            m = int(rng.integers(2, 31))
            ap = approximant(spec, a, m)
            assert abs(ap.drifts.mean() + a / 2.0) <= 1e-12
            direct = approximant_rates_direct(ap)
            assert np.abs(direct - ap.rates).max() <= 1e-10

    def test_prefix_matches_infinite_family_exactly(self):
        for spec, a, m in [(ATLAS, 1.0, 5), (INVERTED, 2.25, 7), (DRIFTLESS, 0.5, 9)]:
            ap = approximant(spec, a, m)
            np.testing.assert_array_equal(ap.rates[:m], infinite_rates(spec, a, m).rates)

    def test_rejects_a_at_bound(self):
        with pytest.raises(StationarityBoundError):
            approximant(INVERTED, 2.0, 3)


class TestGapLaw:
    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            GapLaw(np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            GapLaw(np.array([-2.0]))

    def test_means(self):
        law = GapLaw(np.array([2.0, 4.0]))
        np.testing.assert_array_equal(law.means, [0.5, 0.25])

    def test_csv_export(self):
        law = GapLaw(np.array([3.0, 4.0]))
        buf = io.StringIO()
        law.to_csv(buf)
        assert buf.getvalue() == "k,lambda_k,mean_k\n1,3.0,0.3333333333333333\n2,4.0,0.25\n"


class TestSampleGaps:
    def test_unit_rate_mean(self):
        samples = sample_gaps(GapLaw(np.array([1.0])), 200_000, RngSpec(1, 0))
        se = samples.std(ddof=1) / np.sqrt(samples.size)
        assert abs(samples.mean() - 1.0) <= 3 * se

    def test_column_means_match_reciprocal_rates(self):
        law = GapLaw(np.array([3.0, 4.0, 5.0]))
        samples = sample_gaps(law, 100_000, RngSpec(2, 5))
        for k, rate in enumerate(law.rates):
            col = samples[:, k]
            se = col.std(ddof=1) / np.sqrt(col.size)
            assert abs(col.mean() - 1.0 / rate) <= 3 * se

    def test_deterministic_for_fixed_stream(self):
        law = GapLaw(np.array([2.0, 7.0]))
        a = sample_gaps(law, 50, RngSpec(11, 3))
        b = sample_gaps(law, 50, RngSpec(11, 3))
        np.testing.assert_array_equal(a, b)
        assert np.all(a > 0)

    def test_rejects_zero_count(self):
        with pytest.raises(ValueError):
            sample_gaps(GapLaw(np.array([1.0])), 0, RngSpec(0, 0))


class TestPositionsFromGaps:
    def test_unit_gaps(self):
        np.testing.assert_array_equal(positions_from_gaps([1.0, 1.0, 1.0]), [0.0, 1.0, 2.0, 3.0])

    def test_empty_gaps_single_particle(self):
        np.testing.assert_array_equal(positions_from_gaps([]), [0.0])

    def test_rejects_negative_gap(self):
        with pytest.raises(ValueError):
            positions_from_gaps([0.5, -0.1])

    def test_depth_100_position_mean_and_variance(self):
        # sums of independent exponentials: mean sum(1/rate), var sum(1/rate^2)
        rates = np.arange(3.0, 103.0)
        law = GapLaw(rates)
        target = np.sum(1.0 / rates)
        spread = 3.0 * np.sqrt(np.sum(1.0 / rates**2))
        xi_last = [
            positions_from_gaps(sample_gaps(law, 1, RngSpec(77, i))[0])[-1] for i in range(50)
        ]
        # each terminal position individually lands in the 3-sigma band
        assert np.sum(np.abs(np.array(xi_last) - target) <= spread) >= 48
