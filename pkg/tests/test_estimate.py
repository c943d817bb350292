"""Rolling estimators, confidence interval, ACF, summary stats, unit-root test."""

import math

import numpy as np
import pytest
from scipy.special import gamma as _gamma

from hurstvol import synth
from hurstvol.estimate import (
    HurstTrajectory,
    WindowConfig,
    acf,
    adf_test,
    hurst_pointwise,
    martingale_ci,
    ratio_log_moment_bias,
    realized_vol,
    summary_stats,
    to_log_prices,
    window_moment2,
)
from hurstvol.series import TimeSeries


class TestLogPrices:
    def test_elementwise_log(self):
        ts = TimeSeries(np.array([1.0, math.e, math.e ** 2]), role="price")
        out = to_log_prices(ts)
        assert np.allclose(out.values, [0.0, 1.0, 2.0])
        assert out.role == "log-price"
        assert len(out) == len(ts)

    def test_zero_price_reports_index(self):
        ts = TimeSeries(np.array([1.0, 0.0, 2.0]), role="price")
        with pytest.raises(ValueError, match="index 1"):
            to_log_prices(ts)


class TestWindowMoments:
    def test_constant_window(self):
        w = np.full(12, 3.0)
        assert window_moment2(w, 1) == 0.0
        assert window_moment2(w, 2) == 0.0

    def test_linear_window(self):
        c = 0.7
        w = c * np.arange(12.0)
        assert window_moment2(w, 1) == pytest.approx(c ** 2, rel=1e-12)
        assert window_moment2(w, 2) == pytest.approx(4 * c ** 2, rel=1e-12)

    def test_random_window_positive_ratio(self):
        rng = np.random.default_rng(0)
        w = np.cumsum(rng.standard_normal(22))
        assert window_moment2(w, 2) / window_moment2(w, 1) > 0.0

    def test_bad_lag(self):
        with pytest.raises(ValueError):
            window_moment2(np.arange(12.0), 3)


class TestRealizedVol:
    def test_alternating_increments(self):
        c = 0.3
        x = np.concatenate([[0.0], np.cumsum(c * np.array([1, -1] * 10))])
        assert realized_vol(x) == pytest.approx(c, rel=1e-12)

    def test_constant_window_is_zero(self):
        assert realized_vol(np.full(21, 5.0)) == 0.0

    def test_iid_mean_matches_chi_oracle(self):
        # E[sqrt(mean of delta squared normals)] = sigma * sqrt(2/d) G((d+1)/2)/G(d/2)
        sigma, delta, windows = 0.01, 20, 10_000
        expected = sigma * math.sqrt(2.0 / delta) * _gamma((delta + 1) / 2) / _gamma(delta / 2)
        rng = np.random.default_rng(1)
        vols = np.empty(windows)
        for i in range(windows):
            x = np.concatenate([[0.0], np.cumsum(sigma * rng.standard_normal(delta))])
            vols[i] = realized_vol(x)
        se = vols.std(ddof=1) / math.sqrt(windows)
        assert abs(vols.mean() - expected) <= 3 * se
        assert vols.mean() == pytest.approx(sigma, rel=0.02)

    def test_centered_variant(self):
        x = np.cumsum(np.full(21, 0.5))  # deterministic drift
        assert realized_vol(x) == pytest.approx(0.5)
        assert realized_vol(x, centered=True) == pytest.approx(0.0, abs=1e-12)

    def test_too_short(self):
        with pytest.raises(ValueError):
            realized_vol(np.array([1.0]))


class TestWindowConfig:
    def test_rejects_odd_or_small_delta(self):
        with pytest.raises(ValueError):
            WindowConfig(delta=21)
        with pytest.raises(ValueError):
            WindowConfig(delta=6)

    def test_rejects_bad_estimator(self):
        with pytest.raises(ValueError):
            WindowConfig(estimator="magic")


def ratio_cfg(delta=20, stride=1):
    return WindowConfig(delta=delta, stride=stride, estimator="ratio")


class TestHurstPointwise:
    def test_linear_series_gives_one_exactly(self):
        x = 0.01 * np.arange(64.0)
        traj = hurst_pointwise(x, ratio_cfg(delta=8))
        assert np.allclose(traj.h_hat[traj.valid()], 1.0)

    def test_engineered_ratio_of_two(self):
        # increments cycling (1, 1, -1, -1): lag-2 differences are (0, 2, 0, -2),
        # so M' = 2 M and the window ratio gives exactly 1/2
        inc = np.tile([1.0, 1.0, -1.0, -1.0], 16)
        x = np.concatenate([[0.0], np.cumsum(inc)])
        traj = hurst_pointwise(x, ratio_cfg(delta=8))
        assert np.allclose(traj.h_hat[traj.valid()], 0.5)

    def test_record_count_and_causal_indexing(self):
        n, delta = 256, 20
        x = synth.synth_fbm(0.5, n, seed=0)
        traj = hurst_pointwise(x, ratio_cfg(delta=delta))
        assert len(traj) == n - delta - 1
        assert traj.t[0] == delta + 1 and traj.t[-1] == n - 1

    def test_stride(self):
        x = synth.synth_fbm(0.5, 256, seed=0)
        traj = hurst_pointwise(x, ratio_cfg(delta=20, stride=5))
        assert np.all(np.diff(traj.t) == 5)

    def test_series_too_short(self):
        with pytest.raises(ValueError):
            hurst_pointwise(np.arange(21.0), ratio_cfg(delta=20))

    def test_flagged_windows_on_constant_series(self):
        x = np.concatenate([np.zeros(40), np.cumsum(np.random.default_rng(0).standard_normal(60))])
        traj = hurst_pointwise(x, ratio_cfg(delta=20))
        assert traj.flag.any()
        assert np.isnan(traj.h_hat[traj.flag]).all()
        assert (traj.sigma_hat[traj.flag] == 0.0).all()

    def test_scale_invariance(self):
        x = synth.synth_fbm(0.6, 512, seed=3).values
        a = hurst_pointwise(x, ratio_cfg())
        # power-of-two scaling is exact in floating point: bitwise-equal ratios
        b = hurst_pointwise(4.0 * x, ratio_cfg())
        assert np.array_equal(a.h_hat, b.h_hat)
        assert np.allclose(b.sigma_hat, 4.0 * a.sigma_hat, rtol=1e-12)
        # arbitrary positive scaling cancels up to rounding
        c = hurst_pointwise(7.5 * x, ratio_cfg())
        assert np.allclose(a.h_hat, c.h_hat, atol=1e-9)
        assert np.allclose(c.sigma_hat, 7.5 * a.sigma_hat, rtol=1e-12)

    def test_shift_invariance_exact(self):
        x = synth.synth_fbm(0.6, 512, seed=3).values
        a = hurst_pointwise(x, ratio_cfg())
        b = hurst_pointwise(x + 123.0, ratio_cfg())
        assert np.allclose(a.h_hat, b.h_hat, equal_nan=True)
        assert np.allclose(a.sigma_hat, b.sigma_hat)

    def test_sigma_aligned_with_window_moment(self):
        x = synth.synth_fbm(0.5, 128, seed=1).values
        traj = hurst_pointwise(x, ratio_cfg())
        t0 = traj.t[10]
        w = x[t0 - 21: t0 + 1]
        assert traj.sigma_hat[10] == pytest.approx(math.sqrt(window_moment2(w, 1)), rel=1e-12)

    @pytest.mark.parametrize("h", [0.3, 0.5, 0.7])
    def test_scaled_estimator_recovers_fbm_exponent(self, h):
        means = []
        for seed in range(15):
            traj = hurst_pointwise(synth.synth_fbm(h, 2 ** 13, seed))
            means.append(np.nanmean(traj.h_hat))
        assert abs(np.mean(means) - h) <= 0.03

    def test_scaled_estimator_dispersion_under_martingale(self):
        stds = []
        n = 2 ** 13
        for seed in range(15):
            traj = hurst_pointwise(synth.synth_fbm(0.5, n, seed))
            stds.append(np.nanstd(traj.h_hat))
        target = 1.0 / math.sqrt(2 * 20 * math.log(n - 1) ** 2)
        assert np.mean(stds) == pytest.approx(target, rel=0.15)

    def test_no_lookahead_in_ratio_mode(self):
        x = synth.synth_fbm(0.5, 512, seed=9).values
        full = hurst_pointwise(x, ratio_cfg())
        trunc = hurst_pointwise(x[:-50], ratio_cfg())
        m = len(trunc.t)
        assert np.allclose(full.h_hat[:m], trunc.h_hat, equal_nan=True)
        assert np.allclose(full.sigma_hat[:m], trunc.sigma_hat)


class TestRatioBias:
    def test_matches_monte_carlo_at_07(self):
        analytic = ratio_log_moment_bias(20, 0.7)
        cov = synth.FgnCovariance(h=0.7, normalization="unit")
        gseq = np.array([synth.fgn_autocov(cov, k) for k in range(21)])
        idx = np.abs(np.arange(21)[:, None] - np.arange(21)[None, :])
        chol = np.linalg.cholesky(gseq[idx])
        rng = np.random.default_rng(0)
        vals = np.empty(20_000)
        for i in range(len(vals)):
            d = chol @ rng.standard_normal(21)
            vals[i] = 0.5 * math.log2(np.mean((d[1:] + d[:-1]) ** 2) / np.mean(d[1:] ** 2)) - 0.7
        assert analytic == pytest.approx(vals.mean(), abs=3 * vals.std() / math.sqrt(len(vals)))


class TestMartingaleCI:
    def test_reference_values(self):
        lo, hi = martingale_ci(18101, 20, 0.05)
        assert (round(lo, 3), round(hi, 3)) == (0.468, 0.532)
        lo, hi = martingale_ci(7555, 20, 0.05)
        assert (round(lo, 3), round(hi, 3)) == (0.465, 0.535)

    def test_degenerate_at_alpha_one(self):
        lo, hi = martingale_ci(1000, 20, 1 - 1e-12)
        assert lo == pytest.approx(0.5, abs=1e-9)
        assert hi == pytest.approx(0.5, abs=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            martingale_ci(1000, 20, 0.0)
        with pytest.raises(ValueError):
            martingale_ci(10, 20, 0.05)


class TestAcf:
    def test_lag_zero_is_one(self):
        assert acf(np.random.default_rng(0).standard_normal(100), 10)[0] == 1.0

    def test_iid_within_bartlett_bound(self):
        n = 2 ** 15
        z = synth.synth_iid(1.0, n, seed=0).values
        rho = acf(z, 100)
        frac = np.mean(np.abs(rho[1:]) < 3.0 / math.sqrt(n))
        assert frac >= 0.95

    def test_ar1_lag_one(self):
        x = synth.synth_ar1(0.9, 1.0, 2 ** 15, seed=1).values
        rho = acf(x, 1)
        se = 2 * math.sqrt((1 - 0.81) / len(x))
        assert abs(rho[1] - 0.9) <= 3 * se

    def test_max_lag_bound(self):
        with pytest.raises(ValueError):
            acf(np.arange(40.0), 10)


def _traj_from_values(h_values, n=None, delta=20):
    h = np.asarray(h_values, dtype=float)
    n = n if n is not None else len(h) + delta + 1
    return HurstTrajectory(
        t=np.arange(delta + 1, delta + 1 + len(h)),
        h_hat=h,
        sigma_hat=np.full(len(h), 0.01),
        flag=np.zeros(len(h), dtype=bool),
        config=WindowConfig(delta=delta),
        n=n,
    )


class TestSummaryStats:
    def test_constant_sequence_flagged_degenerate(self):
        stats = summary_stats(_traj_from_values(np.full(200, 0.5)))
        assert stats.degenerate
        assert math.isnan(stats.skewness) and math.isnan(stats.kurtosis)
        assert stats.std == 0.0

    def test_gaussian_moments(self):
        rng = np.random.default_rng(2)
        z = rng.standard_normal(10 ** 5)
        stats = summary_stats(_traj_from_values(0.5 + 0.01 * z))
        assert stats.kurtosis == pytest.approx(3.0, abs=3 * math.sqrt(24 / len(z)))
        assert stats.skewness == pytest.approx(0.0, abs=3 * math.sqrt(6 / len(z)))
        assert stats.minimum <= stats.mean <= stats.maximum

    def test_mean_reverting_exponent_inside_martingale_band(self):
        hp = synth.synth_fou_h(0.05, 0.05 * math.sqrt(0.1), 0.5, 2 ** 14, seed=3)
        stats = summary_stats(_traj_from_values(hp.values, n=2 ** 14))
        assert stats.ci_lo < stats.mean < stats.ci_hi
        assert stats.adf_reject  # strongly mean-reverting

    def test_needs_enough_records(self):
        with pytest.raises(ValueError):
            summary_stats(_traj_from_values(np.full(50, 0.5)))


class TestAdf:
    def test_size_on_random_walks(self):
        rng = np.random.default_rng(4)
        rej = sum(adf_test(np.cumsum(rng.standard_normal(5000))).reject
                  for _ in range(60))
        assert rej / 60 <= 0.08

    def test_power_on_ou(self):
        rng = np.random.default_rng(5)
        stats = []
        for _ in range(10):
            eps = rng.standard_normal(5000)
            x = np.empty(5000)
            x[0] = 0.0
            for t in range(1, 5000):
                x[t] = 0.95 * x[t - 1] + eps[t]
            res = adf_test(x)
            stats.append(res.stat)
            assert res.reject
        assert np.mean(stats) < -3.41 - 2.0  # far below the critical value

    def test_critical_value_near_asymptote(self):
        rng = np.random.default_rng(6)
        res = adf_test(np.cumsum(rng.standard_normal(18000)))
        assert res.critical_5pct == pytest.approx(-3.41, abs=0.01)

    def test_schwert_lag_rule(self):
        rng = np.random.default_rng(7)
        res = adf_test(np.cumsum(rng.standard_normal(5000)))
        assert res.nlags == int(12 * (5000 / 100) ** 0.25)

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            adf_test(np.arange(30.0))
