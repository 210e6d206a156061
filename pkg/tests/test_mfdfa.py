import numpy as np
import pytest

from mfdcca import (
    DetrendConfig,
    QGrid,
    build_profile,
    default_q_grid,
    detrended_variance,
    generate,
    make_scale_grid,
    mfdfa,
)
from mfdcca.binomial import analytic

from conftest import brute_force_variance


class TestDetrendedVariance:
    def test_exact_linear_segment_is_zero(self):
        profile = np.arange(0.0, 16.0)
        assert detrended_variance(profile, 4, 2, DetrendConfig(1)) < 1e-24

    def test_order_zero_alternating(self):
        assert detrended_variance(np.array([0.0, 1.0, 0.0, 1.0]), 4, 1,
                                  DetrendConfig(0)) == pytest.approx(0.25)

    def test_matches_brute_force_on_cascade(self, profile12_pair):
        px, _ = profile12_pair
        for scale, nu in [(4, 1), (4, 7), (16, 3), (64, 2)]:
            expected = brute_force_variance(px.values, scale, nu, 1)
            got = detrended_variance(px, scale, nu, DetrendConfig(1))
            assert got == pytest.approx(expected, rel=1e-9)


@pytest.fixture(scope="module")
def cascade_result(cascade12_pair):
    x, _ = cascade12_pair
    return mfdfa(x)


class TestMfdfaPipeline:
    def test_all_values_positive(self, cascade_result):
        table = cascade_result.fluctuations
        assert table.valid.all()
        assert (table.values > 0).all()

    def test_moment_monotonicity_in_q(self, cascade_result):
        # power-mean inequality: F_q non-decreasing in q at every scale
        values = cascade_result.fluctuations.values
        assert (np.diff(values, axis=1) >= -1e-12 * values[:, :-1]).all()

    def test_tau_at_zero_is_exactly_minus_one(self, cascade_result):
        fit = cascade_result.fit
        j = int(np.flatnonzero(fit.qs == 0.0)[0])
        assert fit.tau[j] == -1.0

    def test_spectrum_identity(self, cascade_result):
        spec = cascade_result.spectrum
        tau = cascade_result.fit.tau[np.isfinite(cascade_result.fit.tau)]
        assert np.abs(spec.qs * spec.alpha - tau - spec.f_alpha).max() < 1e-12

    def test_h_is_non_increasing(self, cascade_result):
        assert (np.diff(cascade_result.fit.h) <= 1e-9).all()

    def test_scaling_invariance(self, cascade12_pair):
        x, _ = cascade12_pair
        qs = QGrid(np.arange(-4.0, 4.5, 0.5))
        base = mfdfa(x, qs=qs)
        scaled = mfdfa(x.values * 37.5, qs=qs)
        ratio = scaled.fluctuations.values / base.fluctuations.values
        assert np.abs(ratio - 37.5).max() < 1e-10 * 37.5
        assert np.abs(scaled.fit.h - base.fit.h).max() < 1e-10
        assert np.abs(scaled.spectrum.alpha - base.spectrum.alpha).max() < 1e-10
        assert abs(scaled.spectrum.params.width - base.spectrum.params.width) < 1e-10

    def test_q2_matches_plain_dfa_oracle(self, cascade12_pair):
        x, _ = cascade12_pair
        profile = build_profile(x)
        result = mfdfa(x, qs=QGrid(np.array([2.0])))
        table = result.fluctuations
        for i, scale in enumerate(table.scales):
            count = len(profile.values) // int(scale)
            variances = [brute_force_variance(profile.values, int(scale), nu, 1)
                         for nu in range(1, count + 1)]
            expected = np.sqrt(np.mean(variances))
            assert table.values[i, 0] == pytest.approx(expected, rel=1e-9)

    def test_binomial_h2_near_analytic(self, cascade12_pair):
        x, _ = cascade12_pair
        result = mfdfa(x, qs=QGrid(np.array([2.0])))
        assert result.fit.h[0] == pytest.approx(analytic(2.0, 0.3).H, abs=0.05)

    def test_shuffle_kills_correlations(self, cascade12_pair):
        x, _ = cascade12_pair
        shuffled = np.random.default_rng(11).permutation(x.values)
        result = mfdfa(shuffled, qs=QGrid(np.array([2.0])))
        assert abs(result.fit.h[0] - 0.5) < 0.05

    def test_monofractal_surrogate_spectrum_collapses(self):
        noise = np.random.default_rng(7).standard_normal(2 ** 16)
        scales = make_scale_grid(len(noise), min_scale=16)
        result = mfdfa(noise, scales=scales, qs=QGrid(np.arange(-4.0, 4.25, 0.25)))
        assert result.spectrum.params.width < 0.1

    def test_constant_series_degenerates_gracefully(self):
        result = mfdfa(np.full(256, 3.25))
        assert not result.fluctuations.valid.any()
        assert result.spectrum is None

    def test_order_must_fit_in_smallest_scale(self, cascade12_pair):
        x, _ = cascade12_pair
        with pytest.raises(ValueError, match="poly_order"):
            mfdfa(x, config=DetrendConfig(poly_order=3))

    def test_delta_h_tracks_analytic_range(self, cascade12_pair):
        x, _ = cascade12_pair
        result = mfdfa(x)
        est = result.fit.h[0] - result.fit.h[-1]
        true = analytic(-10.0, 0.3).H - analytic(10.0, 0.3).H
        assert abs(est - true) < 0.15

    def test_q2_matches_closed_form_linear_dfa(self):
        # independent oracle: centered-abscissa normal equations in closed form
        noise = np.random.default_rng(13).standard_normal(8192)
        profile = build_profile(noise).values
        result = mfdfa(noise, qs=QGrid(np.array([2.0])))
        table = result.fluctuations
        for i, scale in enumerate(table.scales):
            n = int(scale)
            count = len(profile) // n
            t = np.arange(1.0, n + 1)
            t_c = t - t.mean()
            acc = 0.0
            for nu in range(count):
                seg = profile[nu * n:(nu + 1) * n]
                slope = (t_c @ (seg - seg.mean())) / (t_c @ t_c)
                res = seg - (seg.mean() + slope * t_c)
                acc += res @ res / n
            expected = np.sqrt(acc / count)
            assert table.values[i, 0] == pytest.approx(expected, rel=1e-12)

    def test_full_cascade_h_tracks_analytic_over_core_orders(self):
        qs = np.arange(-4.0, 4.25, 0.25)
        x = generate(stages=16, p=0.3)
        fit = mfdfa(x, qs=QGrid(qs)).fit
        assert np.abs(fit.h - analytic(qs, 0.3).H).max() < 0.05
