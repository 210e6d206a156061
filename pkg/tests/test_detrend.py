import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfdcca import DetrendConfig, fit_trend, segment_bounds, signed_cov_stats
from mfdcca.detrend import residual_matrix, segment_residuals

from conftest import brute_force_fit

nonzero_floats = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False).filter(
    lambda v: abs(v) > 1e-6
)
residual_pairs = st.tuples(
    st.lists(nonzero_floats, min_size=4, max_size=32),
    st.lists(nonzero_floats, min_size=4, max_size=32),
).map(lambda t: (t[0][: min(len(t[0]), len(t[1]))], t[1][: min(len(t[0]), len(t[1]))]))


class TestSegmentBounds:
    def test_floor_division_with_remainder(self):
        assert segment_bounds(16, 4) == [(1, 4), (5, 8), (9, 12), (13, 16)]
        # 19 = 4*4 + 3: the three trailing points are discarded
        assert segment_bounds(19, 4) == [(1, 4), (5, 8), (9, 12), (13, 16)]

    def test_paper_sized_segmentation(self):
        assert len(segment_bounds(65536, 4)) == 16384

    def test_scale_above_quarter_rejected(self):
        with pytest.raises(ValueError, match="N/4"):
            segment_bounds(8, 8)

    def test_scale_below_four_rejected(self):
        with pytest.raises(ValueError, match="at least 4"):
            segment_bounds(10, 3)


class TestFitTrend:
    def test_exact_line(self):
        fitted = fit_trend([1.0, 3.0, 5.0, 7.0], DetrendConfig(1))
        assert np.allclose(fitted, [1, 3, 5, 7], atol=1e-12)

    def test_order_zero_is_mean(self):
        fitted = fit_trend([1.0, 2.0, 2.0, 1.0], DetrendConfig(0))
        assert np.allclose(fitted, 1.5, atol=1e-14)

    def test_exact_parabola(self):
        k = np.arange(1.0, 9.0)
        fitted = fit_trend(k ** 2, DetrendConfig(2))
        assert np.abs(fitted - k ** 2).max() < 1e-9

    def test_segment_shorter_than_basis_rejected(self):
        with pytest.raises(ValueError, match="must exceed"):
            fit_trend([1.0, 2.0], DetrendConfig(1))

    def test_matches_raw_abscissa_oracle(self):
        rng = np.random.default_rng(3)
        for order in (0, 1, 2, 3):
            seg = rng.standard_normal(37)
            expected = brute_force_fit(seg, order)
            assert np.allclose(fit_trend(seg, DetrendConfig(order)), expected,
                               rtol=1e-8, atol=1e-10)

    @given(st.lists(nonzero_floats, min_size=6, max_size=40),
           st.integers(min_value=0, max_value=2))
    @settings(max_examples=50, deadline=None)
    def test_invariant_to_added_polynomial(self, values, order):
        seg = np.asarray(values)
        k = np.arange(1.0, len(seg) + 1)
        added = np.full_like(k, 3.0)
        if order >= 1:
            added = added - 0.5 * k
        if order >= 2:
            added = added + 0.25 * k * k
        res_a = seg - fit_trend(seg, DetrendConfig(order))
        res_b = (seg + added) - fit_trend(seg + added, DetrendConfig(order))
        scale = max(1.0, np.abs(seg).max(), np.abs(added).max())
        assert np.abs(res_a - res_b).max() < 1e-9 * scale


class TestResidualMatrix:
    def test_rows_match_per_segment_path(self, profile12_pair):
        px, _ = profile12_pair
        mat = residual_matrix(px.values, 32, DetrendConfig(1))
        for nu in (1, 2, len(mat)):
            one = segment_residuals(px.values, 32, nu, DetrendConfig(1))
            assert np.allclose(mat[nu - 1], one.residuals, rtol=1e-12, atol=1e-15)

    def test_bad_segment_index(self, profile12_pair):
        px, _ = profile12_pair
        with pytest.raises(ValueError, match="outside"):
            segment_residuals(px.values, 32, 0)


class TestSignedCovStats:
    def test_self_product_example(self):
        s = signed_cov_stats([1.0, -1.0, 2.0], [1.0, -1.0, 2.0])
        assert s.cov == pytest.approx(2.0)
        assert (s.n_plus, s.n_minus) == (3, 0)
        # trend-side convention: P marks residuals <= 0, so the -1 pair is PP
        assert (s.n_pp, s.n_mm) == (1, 2)
        assert (s.n_pm, s.n_mp) == (0, 0)

    def test_antialigned_example(self):
        s = signed_cov_stats([1.0, -1.0], [-1.0, 1.0])
        assert s.cov == pytest.approx(-1.0)
        assert s.n_minus == 2
        assert (s.n_pm, s.n_mp) == (1, 1)

    def test_zero_product_counts_positive(self):
        s = signed_cov_stats([2.0, 0.0], [3.0, 5.0])
        assert s.n_plus == 2
        assert s.cov == pytest.approx(3.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            signed_cov_stats([1.0, 2.0], [1.0])

    @given(residual_pairs)
    @settings(max_examples=100, deadline=None)
    def test_decomposition_identities(self, pair):
        rx, ry = np.asarray(pair[0]), np.asarray(pair[1])
        s = signed_cov_stats(rx, ry)
        n = len(rx)
        mag = max(1.0, abs(s.sum_plus), abs(s.sum_minus))
        assert abs(n * s.cov - (s.sum_plus + s.sum_minus)) < 1e-10 * mag
        assert abs((s.sum_plus - s.sum_minus) - np.abs(rx * ry).sum()) < 1e-10 * mag
        assert s.n_plus + s.n_minus == n
        assert s.n_pp + s.n_pm + s.n_mp + s.n_mm == n
        assert abs(s.sum_plus - (s.s_pp + s.s_mm)) < 1e-10 * mag
        assert abs(s.sum_minus - (s.s_pm + s.s_mp)) < 1e-10 * mag

    @given(residual_pairs)
    @settings(max_examples=100, deadline=None)
    def test_negating_one_series_swaps_groups(self, pair):
        rx, ry = np.asarray(pair[0]), np.asarray(pair[1])
        a = signed_cov_stats(rx, ry)
        b = signed_cov_stats(rx, -ry)
        assert (a.n_plus, a.n_minus) == (b.n_minus, b.n_plus)
        assert (a.n_pp, a.n_pm, a.n_mp, a.n_mm) == (b.n_pm, b.n_pp, b.n_mm, b.n_mp)
        assert b.cov == pytest.approx(-a.cov, rel=1e-12)

    @given(st.lists(nonzero_floats, min_size=4, max_size=32))
    @settings(max_examples=100, deadline=None)
    def test_self_stats_have_no_negatives(self, values):
        r = np.asarray(values)
        s = signed_cov_stats(r, r)
        assert s.n_minus == 0
        assert (s.n_pm, s.n_mp) == (0, 0)
