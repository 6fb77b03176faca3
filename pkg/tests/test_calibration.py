import json

import numpy as np
import pytest

from domscore.calibration import (
    hac_covariance,
    lobato_velasco,
    moment_table,
    mz_regression,
    newey_west_bandwidth,
    prop52_check,
)
from domscore.exceptions import (
    DegenerateRegressor,
    TooFewEffectiveObservations,
    TooFewObservations,
)
from domscore.series import PairedSeries


def series_xy(x, y):
    return PairedSeries(y=np.asarray(y, float), tracks={"A": np.asarray(x, float)})


class TestMzRegression:
    def test_perfect_calibration(self):
        x = np.linspace(-2, 2, 50)
        fit = mz_regression(series_xy(x, x), "A")
        assert fit.alpha == pytest.approx(0.0, abs=1e-12)
        assert fit.beta == pytest.approx(1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_wald_accepts_calibrated_noisy(self):
        rng = np.random.default_rng(21)
        x = rng.normal(size=500)
        fit = mz_regression(series_xy(x, x + rng.normal(size=500)), "A")
        assert fit.wald_pvalue > 0.05

    def test_exact_line(self):
        fit = mz_regression(series_xy([0.0, 1.0, 2.0], [0.0, 2.0, 4.0]), "A")
        assert fit.alpha == pytest.approx(0.0, abs=1e-12)
        assert fit.beta == pytest.approx(2.0, abs=1e-12)

    def test_degenerate_regressor(self):
        with pytest.raises(DegenerateRegressor):
            mz_regression(series_xy([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]), "A")

    def test_too_few_rows(self):
        with pytest.raises(TooFewObservations):
            mz_regression(series_xy([1.0, 2.0], [1.0, 2.0]), "A")

    def test_matches_statsmodels_hc0(self):
        sm = pytest.importorskip("statsmodels.api")
        rng = np.random.default_rng(3)
        x = rng.normal(size=200)
        y = 0.3 + 0.8 * x + rng.normal(size=200)
        fit = mz_regression(series_xy(x, y), "A", bandwidth=0)
        model = sm.OLS(y, sm.add_constant(x)).fit(cov_type="HC0")
        assert fit.alpha == pytest.approx(model.params[0], abs=1e-10)
        assert fit.beta == pytest.approx(model.params[1], abs=1e-10)
        assert fit.se_alpha == pytest.approx(model.bse[0], rel=1e-8)
        assert fit.se_beta == pytest.approx(model.bse[1], rel=1e-8)

    def test_matches_statsmodels_hac(self):
        sm = pytest.importorskip("statsmodels.api")
        rng = np.random.default_rng(5)
        e = rng.normal(size=300)
        for t in range(1, 300):
            e[t] += 0.5 * e[t - 1]
        x = rng.normal(size=300)
        y = x + e
        fit = mz_regression(series_xy(x, y), "A", bandwidth=4)
        model = sm.OLS(y, sm.add_constant(x)).fit(
            cov_type="HAC", cov_kwds={"maxlags": 4, "use_correction": False}
        )
        assert fit.se_alpha == pytest.approx(model.bse[0], rel=1e-8)
        assert fit.se_beta == pytest.approx(model.bse[1], rel=1e-8)

    def test_auto_bandwidth_positive_on_dependent_errors(self):
        rng = np.random.default_rng(6)
        e = rng.normal(size=2000)
        for t in range(1, 2000):
            e[t] += 0.8 * e[t - 1]
        x = rng.normal(size=2000)
        fit = mz_regression(series_xy(x, x + e), "A")
        assert fit.bandwidth > 0

    def test_json_round_trip(self):
        x = np.linspace(0, 1, 30)
        fit = mz_regression(series_xy(x, x), "A")
        payload = json.loads(fit.to_json())
        assert payload["n"] == 30
        assert payload["beta"] == pytest.approx(1.0, abs=1e-12)


class TestHacCovariance:
    def test_bandwidth_zero_is_outer_product(self):
        rng = np.random.default_rng(1)
        m = rng.normal(size=(60, 2))
        np.testing.assert_allclose(
            hac_covariance(m, 0), m.T @ m / 60, atol=1e-14
        )

    def test_bartlett_weights(self):
        rng = np.random.default_rng(2)
        m = rng.normal(size=(40, 1))
        got = hac_covariance(m, 2)[0, 0]
        g0 = float(m[:, 0] @ m[:, 0]) / 40
        g1 = float(m[1:, 0] @ m[:-1, 0]) / 40
        g2 = float(m[2:, 0] @ m[:-2, 0]) / 40
        assert got == pytest.approx(g0 + 2 * (2 / 3) * g1 + 2 * (1 / 3) * g2)

    def test_plugin_bandwidth_grows_with_persistence(self):
        rng = np.random.default_rng(7)
        iid = rng.normal(size=(3000, 1))
        ar = iid.copy()
        for t in range(1, 3000):
            ar[t] += 0.9 * ar[t - 1]
        w = np.array([1.0])
        assert newey_west_bandwidth(ar, w) > newey_west_bandwidth(iid, w)


class TestMomentTable:
    def test_zero_mse_on_identity(self):
        x = np.array([1.0, 2.0, 3.0])
        table = moment_table(series_xy(x, x))
        assert table.per_track["A"].mse == 0.0

    def test_matched_spread_and_slope(self):
        table = moment_table(series_xy([-1.0, 1.0], [-1.0, 1.0]))
        m = table.per_track["A"]
        assert m.sigma == pytest.approx(table.sigma_y)
        assert m.beta == pytest.approx(1.0)

    def test_gaussian_fourth_moment(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=1_000_000)
        table = moment_table(PairedSeries(y=x, tracks={"A": x}))
        se = np.sqrt((x**4).var() / x.size)
        assert abs(table.per_track["A"].fourth_moment - 3.0) < 3 * se

    def test_jensen_on_centered(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            x = rng.normal(size=int(rng.integers(2, 50)))
            table = moment_table(
                PairedSeries(y=x, tracks={"A": x}), centered=True
            )
            m = table.per_track["A"]
            assert m.fourth_moment >= m.sigma**4 - 1e-12

    def test_beta_matches_mz(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=500)
        y = 0.4 * x + rng.normal(size=500)
        s = series_xy(x, y)
        table = moment_table(s)
        fit = mz_regression(s, "A", bandwidth=0)
        assert table.per_track["A"].beta == pytest.approx(fit.beta, abs=1e-12)

    def test_too_few(self):
        with pytest.raises(TooFewObservations):
            moment_table(series_xy([1.0], [1.0]))

    def test_text_layout(self):
        text = moment_table(series_xy([-1.0, 1.0], [-1.0, 1.0])).to_text()
        assert text.startswith("sigma_y")
        assert "beta" in text


class TestProp52:
    def test_identical_tracks_all_pass(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=100)
        s = PairedSeries(y=x + rng.normal(size=100), tracks={"A": x, "B": x})
        report = prop52_check(s, "A", "B")
        assert report.all_pass
        assert report.failing() == []

    def test_ordered_noise_scenario(self):
        from domscore.simulate import gen_common_info_noise

        s = gen_common_info_noise(
            eta_a_sigma=0.3, eta_b_sigma=1.0, n=100_000, seed=1
        )
        assert prop52_check(s, "A", "B").all_pass

    def test_reports_moment_failure(self):
        rng = np.random.default_rng(13)
        # inject a heavy-tailed A so the even-moment ordering breaks
        a = rng.standard_t(3, size=4000) * 2.0
        b = rng.normal(size=4000) * 0.5
        s = PairedSeries(y=rng.normal(size=4000), tracks={"A": a, "B": b})
        report = prop52_check(s, "A", "B")
        assert "moments_ordered" in report.failing()

    def test_reports_slope_failure(self):
        rng = np.random.default_rng(14)
        y = rng.normal(size=4000)
        s = PairedSeries(y=y, tracks={"A": 0.25 * y, "B": 0.25 * y})
        report = prop52_check(s, "A", "B")
        assert "slopes_below_one" in report.failing()


class TestLobatoVelasco:
    def test_constant_series(self):
        with pytest.raises(TooFewEffectiveObservations):
            lobato_velasco(np.ones(100))

    def test_too_short(self):
        with pytest.raises(TooFewObservations):
            lobato_velasco(np.arange(10.0))

    def test_power_on_exponential(self):
        rng = np.random.default_rng(15)
        rejections = sum(
            lobato_velasco(rng.exponential(size=5000)).p_value < 0.05
            for _ in range(50)
        )
        assert rejections >= 48

    def test_reasonable_size_on_normal(self):
        rng = np.random.default_rng(16)
        rejections = sum(
            lobato_velasco(rng.normal(size=5000)).p_value < 0.05
            for _ in range(100)
        )
        assert 0 <= rejections <= 13

    def test_robust_to_autocorrelation(self):
        # Gaussian AR(1) is still marginally normal; rejection must stay rare
        rng = np.random.default_rng(17)
        rejections = 0
        for _ in range(50):
            x = rng.normal(size=5000)
            for t in range(1, 5000):
                x[t] = 0.6 * x[t - 1] + x[t]
            rejections += lobato_velasco(x).p_value < 0.05
        assert rejections <= 8


class TestR2Ordering:
    def test_nested_information_orders_r2(self):
        from domscore.simulate import gen_sum_components

        wins = 0
        for seed in range(20):
            s = gen_sum_components(n=100_000, seed=seed)
            ra = mz_regression(s, "A", bandwidth=0).r_squared
            rb = mz_regression(s, "B", bandwidth=0).r_squared
            wins += ra > rb
        assert wins == 20
