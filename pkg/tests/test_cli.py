import json

import numpy as np
import pytest

from domscore.cli import DEFAULT_SEED, main
from domscore.series import PairedSeries
from domscore.simulate import gen_sum_components


def run_cli(argv):
    try:
        main(argv)
    except SystemExit as exc:
        return int(exc.code)
    return 0


def write_series(tmp_path, series, name="input.csv"):
    path = tmp_path / name
    path.write_text(series.to_csv(), encoding="utf-8")
    return str(path)


@pytest.fixture
def small_series():
    rng = np.random.default_rng(0)
    return PairedSeries(
        y=rng.normal(size=80),
        tracks={"A": rng.normal(size=80), "B": rng.normal(size=80)},
    )


class TestSimulate:
    def test_round_trip_bit_stable(self, tmp_path):
        scenario = tmp_path / "scenario.json"
        scenario.write_text(
            json.dumps({"kind": "SumComponents", "n": 40, "seed": DEFAULT_SEED})
        )
        out = tmp_path / "out"
        assert run_cli(["simulate", "--scenario", str(scenario), "--output", str(out)]) == 0
        text = (out / "series.csv").read_text(encoding="utf-8")
        parsed = PairedSeries.from_csv(text)
        reference = gen_sum_components(n=40, seed=DEFAULT_SEED)
        np.testing.assert_array_equal(parsed.y, reference.y)
        assert parsed.to_csv() == text

    def test_seed_override(self, tmp_path):
        scenario = tmp_path / "scenario.json"
        scenario.write_text(json.dumps({"kind": "SumComponents", "n": 10}))
        out = tmp_path / "out"
        run_cli([
            "simulate", "--scenario", str(scenario),
            "--output", str(out), "--seed", "7",
        ])
        parsed = PairedSeries.from_csv((out / "series.csv").read_text())
        np.testing.assert_array_equal(parsed.y, gen_sum_components(n=10, seed=7).y)


class TestMurphy:
    def test_outputs(self, tmp_path, small_series):
        inp = write_series(tmp_path, small_series)
        out = tmp_path / "out"
        assert run_cli(["murphy", "--input", inp, "--output", str(out)]) == 0
        for name in ("psi_A.csv", "psi_B.csv", "diff_A_B.csv", "murphy.png"):
            assert (out / name).exists(), name
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "murphy"
        assert "murphy.png" in manifest["outputs"]

    def test_no_plot(self, tmp_path, small_series):
        inp = write_series(tmp_path, small_series)
        out = tmp_path / "out"
        assert run_cli([
            "murphy", "--input", inp, "--output", str(out), "--no-plot",
        ]) == 0
        assert not (out / "murphy.png").exists()

    def test_theta_grid_override(self, tmp_path, small_series):
        inp = write_series(tmp_path, small_series)
        out = tmp_path / "out"
        assert run_cli([
            "murphy", "--input", inp, "--output", str(out),
            "--theta-grid=-2:2:9", "--no-plot",
        ]) == 0
        lines = (out / "psi_A.csv").read_text().strip().splitlines()
        assert len(lines) == 10  # header + 9 grid points

    def test_bad_theta_grid(self, tmp_path, small_series):
        inp = write_series(tmp_path, small_series)
        code = run_cli([
            "murphy", "--input", inp, "--output", str(tmp_path / "o"),
            "--theta-grid", "oops",
        ])
        assert code == 2


class TestMz:
    def test_identity_forecast(self, tmp_path):
        x = np.linspace(-1, 3, 60)
        s = PairedSeries(y=x, tracks={"A": x})
        inp = write_series(tmp_path, s)
        out = tmp_path / "out"
        assert run_cli(["mz", "--input", inp, "--output", str(out)]) == 0
        fit = json.loads((out / "mz_A.json").read_text())
        assert fit["alpha"] == pytest.approx(0.0, abs=1e-10)
        assert fit["beta"] == pytest.approx(1.0, abs=1e-10)

    def test_center_removes_intercept(self, tmp_path):
        rng = np.random.default_rng(3)
        x = rng.normal(size=100)
        s = PairedSeries(y=x + 5.0, tracks={"A": x})
        inp = write_series(tmp_path, s)
        out = tmp_path / "out"
        assert run_cli([
            "mz", "--input", inp, "--output", str(out), "--center",
        ]) == 0
        fit = json.loads((out / "mz_A.json").read_text())
        assert fit["alpha"] == pytest.approx(0.0, abs=1e-10)


def exact_moment_series(stats, sigma_y, n=200, seed=0):
    """Mean-zero series whose sample moments match ``stats`` exactly.

    stats maps track name -> (sigma_j, beta_j). Builds orthonormal mean-zero
    columns and colors them with the Cholesky factor of the target covariance.
    """
    names = list(stats)
    k = len(names) + 1
    sig = np.array([stats[t][0] for t in names] + [sigma_y])
    rho = np.array(
        [stats[t][1] * stats[t][0] / sigma_y for t in names] + [1.0]
    )
    cov = np.outer(rho * sig, rho * sig)
    for i in range(k):
        cov[i, i] = sig[i] ** 2
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, k))
    m -= m.mean(axis=0)
    q, _ = np.linalg.qr(m)
    z = np.sqrt(n) * q @ np.linalg.cholesky(cov).T
    return PairedSeries(
        y=z[:, -1], tracks={t: z[:, i] for i, t in enumerate(names)}
    )


class TestGauss:
    def test_survey_vs_random_walk_cell(self, tmp_path):
        s = exact_moment_series(
            {"SPF": (0.916, 0.903), "RW": (1.156, 0.471)}, sigma_y=1.160
        )
        inp = write_series(tmp_path, s)
        out = tmp_path / "out"
        assert run_cli(["gauss", "--input", inp, "--output", str(out)]) == 0
        text = (out / "verdicts.csv").read_text()
        spf_row = [r for r in text.splitlines() if r.startswith("SPF>RW")][0]
        assert "ok(Case2a)" in spf_row
        rw_row = [r for r in text.splitlines() if r.startswith("RW>SPF")][0]
        assert "X" in rw_row
        assert (out / "moments.json").exists()
        assert (out / "moments.txt").exists()


class TestConvexOrder:
    def test_outputs(self, tmp_path):
        s = gen_sum_components(n=300, seed=2)
        inp = write_series(tmp_path, s)
        out = tmp_path / "out"
        assert run_cli([
            "convex-order", "--input", inp, "--output", str(out),
            "--b-grid", "50,100", "--no-plot",
        ]) == 0
        assert (out / "integrated_cdf.csv").exists()
        assert (out / "subsample_A_smaller.csv").exists()
        assert (out / "subsample_B_smaller.csv").exists()

    def test_needs_two_tracks(self, tmp_path):
        s = PairedSeries(y=np.arange(30.0), tracks={"A": np.arange(30.0)})
        inp = write_series(tmp_path, s)
        code = run_cli(["convex-order", "--input", inp, "--output", str(tmp_path / "o")])
        assert code == 2


class TestDominance:
    def test_deterministic_output(self, tmp_path, small_series):
        inp = write_series(tmp_path, small_series)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        argv = ["dominance", "--input", inp, "--replications", "100"]
        assert run_cli(argv + ["--output", str(out1)]) == 0
        assert run_cli(argv + ["--output", str(out2)]) == 0
        assert (out1 / "dominance.json").read_bytes() == (
            out2 / "dominance.json"
        ).read_bytes()
        payload = json.loads((out1 / "dominance.json").read_text())
        assert set(payload) == {"A_dominates_B", "B_dominates_A"}


class TestNormality:
    def test_outputs(self, tmp_path):
        rng = np.random.default_rng(5)
        s = PairedSeries(
            y=rng.normal(size=200), tracks={"A": rng.normal(size=200)}
        )
        inp = write_series(tmp_path, s)
        out = tmp_path / "out"
        assert run_cli(["normality", "--input", inp, "--output", str(out)]) == 0
        lines = (out / "normality.csv").read_text().strip().splitlines()
        assert lines[0] == "series,statistic,p_value"
        labels = {line.split(",")[0] for line in lines[1:]}
        assert labels == {"y", "A", "error_A"}

    def test_constant_series_statistical_error(self, tmp_path):
        s = PairedSeries(y=np.ones(100), tracks={"A": np.ones(100)})
        inp = write_series(tmp_path, s)
        code = run_cli(["normality", "--input", inp, "--output", str(tmp_path / "o")])
        assert code == 3


class TestErrorPaths:
    def test_malformed_csv(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("y,A\n1.0,2.0\n1.0,oops\n")
        code = run_cli(["mz", "--input", str(bad), "--output", str(tmp_path / "o")])
        assert code == 2

    def test_missing_file(self, tmp_path):
        code = run_cli([
            "mz", "--input", str(tmp_path / "nope.csv"),
            "--output", str(tmp_path / "o"),
        ])
        assert code == 2

    def test_unknown_track(self, tmp_path, small_series):
        inp = write_series(tmp_path, small_series)
        code = run_cli([
            "mz", "--input", inp, "--output", str(tmp_path / "o"),
            "--tracks", "C",
        ])
        assert code == 2


class TestReplay:
    def test_byte_identical_rerun(self, tmp_path, small_series):
        inp = write_series(tmp_path, small_series)
        out = tmp_path / "out"
        assert run_cli([
            "murphy", "--input", inp, "--output", str(out), "--no-plot",
        ]) == 0
        before = {
            p.name: p.read_bytes() for p in out.iterdir() if p.is_file()
        }
        for p in out.iterdir():
            if p.name != "manifest.json":
                p.unlink()
        assert run_cli(["replay", "--manifest", str(out / "manifest.json")]) == 0
        after = {p.name: p.read_bytes() for p in out.iterdir() if p.is_file()}
        assert before == after
