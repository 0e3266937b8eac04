import numpy as np
import pytest

from cbpsim import BUILTIN_DRIFTS, DriftSpec, RngSpec, drift_values, inf_mean_drift, mean_drifts

ATLAS = BUILTIN_DRIFTS["atlas"]
DRIFTLESS = BUILTIN_DRIFTS["driftless"]
INVERTED = BUILTIN_DRIFTS["inverted-atlas"]


def cumsum_mean_oracle(spec: DriftSpec, n: int) -> list[float]:
    """Independent oracle: explicit running sum, one rank at a time."""
    total = 0.0
    out = []
    for k in range(1, n + 1):
        total += spec.prefix[k - 1] if k <= len(spec.prefix) else spec.tail
        out.append(total / k)
    return out


class TestMeanDrifts:
    def test_atlas_first_three(self):
        expected = [1.0, 0.5, 1.0 / 3.0]  # frozen from the oracle below
        assert cumsum_mean_oracle(ATLAS, 3) == expected
        assert mean_drifts(ATLAS, 3).tolist() == expected

    def test_driftless_all_zero(self):
        assert mean_drifts(DRIFTLESS, 5).tolist() == [0.0] * 5

    def test_inverted_atlas(self):
        expected = [-1.0, -0.5]
        assert cumsum_mean_oracle(INVERTED, 2) == expected
        assert mean_drifts(INVERTED, 2).tolist() == expected

    def test_matches_oracle_for_longer_prefixes(self):
        spec = DriftSpec((0.5, -1.5, 2.0, 0.25), tail=-0.125)
        np.testing.assert_allclose(mean_drifts(spec, 40), cumsum_mean_oracle(spec, 40), rtol=1e-14)

    def test_prefix_consistency(self):
        spec = DriftSpec((2.0, -3.0, 1.0), tail=0.5)
        short = mean_drifts(spec, 7)
        long = mean_drifts(spec, 23)
        np.testing.assert_array_equal(short, long[:7])

    def test_converges_to_tail_at_rate_one_over_n(self):
        spec = DriftSpec((4.0, -2.0, 7.0), tail=0.25)
        # |gbar_n - tail| = |sum(prefix) - n0*tail| / n
        constant = abs(sum(spec.prefix) - len(spec.prefix) * spec.tail)
        for n in (10, 1000, 10**6):
            gbar_n = mean_drifts(spec, n)[-1]
            assert abs(gbar_n - spec.tail) <= constant / n + 1e-15

    def test_rejects_n_below_one(self):
        with pytest.raises(ValueError):
            mean_drifts(ATLAS, 0)


class TestInfMeanDrift:
    def test_named_specs(self):
        assert inf_mean_drift(ATLAS) == 0.0
        assert inf_mean_drift(DRIFTLESS) == 0.0
        assert inf_mean_drift(INVERTED) == -1.0

    def test_is_lower_bound_by_enumeration(self):
        rng = np.random.default_rng(20240101)
        for _ in range(25):
            n0 = int(rng.integers(0, 6))
            spec = DriftSpec(tuple(rng.normal(size=n0)), tail=float(rng.normal()))
            bound = inf_mean_drift(spec)
            gbar = mean_drifts(spec, 10**4)
            assert bound <= gbar.min() + 1e-12
            # the enumerated minimum approaches the exact infimum
            assert gbar.min() - bound <= abs(sum(spec.prefix) - n0 * spec.tail) / 10**4 + 1e-12

    def test_attained_inside_prefix(self):
        spec = DriftSpec((1.0, -5.0, 3.0), tail=2.0)
        # oracle: averages are 1, -2, -1/3, then climb toward 2
        assert inf_mean_drift(spec) == -2.0


class TestDriftSpec:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            DriftSpec((1.0, float("nan")))
        with pytest.raises(ValueError):
            DriftSpec((), tail=float("inf"))

    def test_drift_lookup_and_values(self):
        spec = DriftSpec((3.0, -1.0), tail=0.5)
        assert [spec.drift(k) for k in (1, 2, 3, 9)] == [3.0, -1.0, 0.5, 0.5]
        np.testing.assert_array_equal(drift_values(spec, 4), [3.0, -1.0, 0.5, 0.5])

    def test_dict_round_trip(self):
        spec = DriftSpec((1.0,), 0.0)
        assert DriftSpec.from_dict(spec.to_dict()) == spec
        with pytest.raises(ValueError):
            DriftSpec.from_dict({"prefix": [1.0], "tails": 0.0})


class TestRngSpec:
    def test_identical_pair_reproduces_bitwise(self):
        a = RngSpec(123456789, 7).generator().random(1000)
        b = RngSpec(123456789, 7).generator().random(1000)
        np.testing.assert_array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = RngSpec(1, 0).generator().random(100)
        b = RngSpec(1, 1).generator().random(100)
        assert not np.array_equal(a, b)

    def test_substream_offsets(self):
        base = RngSpec(9, 4)
        assert base.substream(3) == RngSpec(9, 7)
