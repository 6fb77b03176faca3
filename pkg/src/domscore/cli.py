"""Command-line surface composing the analysis modules into pipelines.

Every subcommand reads the standard CSV schema (column ``y`` plus one column
per forecast track), writes its artifacts into ``--output``, and records a
manifest sufficient to reproduce the run bit-for-bit via ``replay``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from importlib import metadata
from pathlib import Path

import numpy as np

from . import bootstrap, calibration, gaussian, murphy, order, simulate
from .exceptions import (
    BadSubsampleSize,
    BadTau,
    DomscoreError,
    MalformedInput,
    NegativeSigma,
    NonStationary,
    UnknownTrack,
    UnsupportedDistribution,
)
from .series import PairedSeries

DEFAULT_SEED = 20180510

EXIT_INPUT_ERROR = 2
EXIT_STAT_ERROR = 3

_INPUT_ERRORS = (
    MalformedInput,
    UnknownTrack,
    BadTau,
    BadSubsampleSize,
    UnsupportedDistribution,
    NonStationary,
    NegativeSigma,
    ValueError,
    FileNotFoundError,
    KeyError,
)


def _version() -> str:
    try:
        return metadata.version("domscore")
    except metadata.PackageNotFoundError:
        return "unknown"


def _atomic_write(path: Path, data: str | bytes) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Emitter:
    """Collects output files for one run and writes the manifest last."""

    def __init__(self, outdir: str):
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def write(self, name: str, data: str | bytes) -> Path:
        path = self.outdir / name
        _atomic_write(path, data)
        self.files.append(name)
        return path

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.outdir / name

    def manifest(self, command: str, params: dict) -> None:
        payload = {
            "command": command,
            "parameters": params,
            "library_version": _version(),
            "outputs": sorted(self.files),
        }
        _atomic_write(
            self.outdir / "manifest.json", json.dumps(payload, indent=2) + "\n"
        )


def _load_series(path: str, center: bool = False) -> PairedSeries:
    text = Path(path).read_text(encoding="utf-8")
    series = PairedSeries.from_csv(text)
    return series.centered() if center else series


def _track_list(series: PairedSeries, tracks: str | None) -> list[str]:
    if not tracks:
        return series.track_names
    names = [t.strip() for t in tracks.split(",") if t.strip()]
    for t in names:
        series.track(t)  # raises UnknownTrack
    return names


def _pair(series: PairedSeries, tracks: str | None) -> tuple[str, str]:
    names = _track_list(series, tracks)
    if len(names) != 2:
        raise ValueError("this command needs exactly two tracks (--tracks A,B)")
    return names[0], names[1]


def _parse_theta_grid(text: str | None) -> np.ndarray | None:
    if not text:
        return None
    try:
        lo, hi, count = text.split(":")
        return np.linspace(float(lo), float(hi), int(count))
    except ValueError:
        raise ValueError("--theta-grid must be lo:hi:count") from None


def cmd_murphy(args) -> None:
    series = _load_series(args.input, args.center)
    names = _track_list(series, args.tracks)
    emit = Emitter(args.output)
    thetas = _parse_theta_grid(args.theta_grid)
    grid = thetas if thetas is not None else murphy.knot_grid(series, names)
    psi_curves = [
        murphy.empirical_psi(series, t, grid, tau=args.tau) for t in names
    ]
    for curve in psi_curves:
        emit.write(f"psi_{curve.label}.csv", curve.to_csv())
    diff_curves = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            curve = murphy.murphy_difference(
                series, names[i], names[j], tau=args.tau, thetas=grid, with_se=True
            )
            diff_curves.append(curve)
            emit.write(f"diff_{names[i]}_{names[j]}.csv", curve.to_csv())
            summary = murphy.dominance_summary(curve)
            print(
                f"{names[i]} vs {names[j]}: empirical dominance="
                f"{summary.empirically_dominant}, max violation="
                f"{summary.max_violation:.6f}"
            )
    if not args.no_plot:
        from . import plots

        plots.save_murphy_figure(psi_curves, diff_curves, emit.path("murphy.png"))
    emit.manifest(
        "murphy",
        {
            "input": args.input,
            "tracks": ",".join(names),
            "tau": args.tau,
            "theta_grid": args.theta_grid,
            "center": args.center,
            "no_plot": args.no_plot,
            "output": args.output,
        },
    )


def cmd_mz(args) -> None:
    series = _load_series(args.input, args.center)
    names = _track_list(series, args.tracks)
    emit = Emitter(args.output)
    for name in names:
        fit = calibration.mz_regression(series, name, bandwidth=args.bandwidth)
        emit.write(f"mz_{name}.json", fit.to_json() + "\n")
        print(
            f"{name}: y = {fit.alpha:.6f} [{fit.se_alpha:.6f}] + "
            f"{fit.beta:.6f} [{fit.se_beta:.6f}] x; R2 = {fit.r_squared:.6f}; "
            f"Wald p = {fit.wald_pvalue:.6f} (bandwidth {fit.bandwidth})"
        )
    emit.manifest(
        "mz",
        {
            "input": args.input,
            "tracks": ",".join(names),
            "bandwidth": args.bandwidth,
            "center": args.center,
            "output": args.output,
        },
    )


def cmd_gauss(args) -> None:
    series = _load_series(args.input, args.center)
    names = _track_list(series, args.tracks)
    emit = Emitter(args.output)
    table = calibration.moment_table(series, centered=args.center)
    params = {
        "0": {
            t: gaussian.params_from_moments(
                table.per_track[t].sigma, table.per_track[t].beta, table.sigma_y
            )
            for t in names
        }
    }
    pairs = [(a, b) for a in names for b in names if a != b]
    matrix = gaussian.classify_table(params, pairs)
    emit.write("verdicts.csv", matrix.to_csv())
    emit.write("verdicts.json", matrix.to_json() + "\n")
    emit.write("moments.json", table.to_json() + "\n")
    emit.write("moments.txt", table.to_text())
    print(table.to_text())
    print(matrix.to_csv())
    emit.manifest(
        "gauss",
        {
            "input": args.input,
            "tracks": ",".join(names),
            "center": args.center,
            "output": args.output,
        },
    )


def cmd_convex_order(args) -> None:
    series = _load_series(args.input, args.center)
    track_a, track_b = _pair(series, args.tracks)
    emit = Emitter(args.output)
    curve = order.integrated_cdf_diff(series, track_a, track_b)
    emit.write("integrated_cdf.csv", curve.to_csv())
    b_grid = None
    if args.b_grid:
        b_grid = [int(v) for v in args.b_grid.split(",")]
    sub_curves = []
    for direction in ("A", "B"):
        sub = order.subsampling_order_test(
            series, track_a, track_b, direction=direction, b_grid=b_grid
        )
        sub_curves.append(sub)
        tag = track_a if direction == "A" else track_b
        emit.write(f"subsample_{tag}_smaller.csv", sub.to_csv())
        print(
            f"H0 {sub.hypothesis}: statistic {sub.statistic_full:.6f}, "
            f"p range [{sub.p_values.min():.6f}, {sub.p_values.max():.6f}]"
        )
    if not args.no_plot:
        from . import plots

        plots.save_integrated_cdf_figure(curve, emit.path("integrated_cdf.png"))
        plots.save_subsample_figure(sub_curves, emit.path("subsample.png"))
    emit.manifest(
        "convex-order",
        {
            "input": args.input,
            "tracks": f"{track_a},{track_b}",
            "b_grid": args.b_grid,
            "center": args.center,
            "no_plot": args.no_plot,
            "output": args.output,
        },
    )


def cmd_dominance(args) -> None:
    series = _load_series(args.input, args.center)
    track_a, track_b = _pair(series, args.tracks)
    emit = Emitter(args.output)
    block = args.block_mean or bootstrap.default_mean_block_length(series.n)
    config = bootstrap.StationaryBootstrapConfig(
        mean_block_length=block, replications=args.replications, seed=args.seed
    )
    results = {}
    for first, second in ((track_a, track_b), (track_b, track_a)):
        res = bootstrap.dominance_test(
            series, first, second, tau=args.tau, config=config
        )
        results[f"{first}_dominates_{second}"] = json.loads(res.to_json())
        print(
            f"H0 {first} dominates {second}: statistic {res.statistic:.6f}, "
            f"p = {res.p_value:.6f}"
        )
    emit.write("dominance.json", json.dumps(results, indent=2) + "\n")
    emit.manifest(
        "dominance",
        {
            "input": args.input,
            "tracks": f"{track_a},{track_b}",
            "tau": args.tau,
            "replications": args.replications,
            "block_mean": args.block_mean,
            "seed": args.seed,
            "center": args.center,
            "output": args.output,
        },
    )


def cmd_normality(args) -> None:
    series = _load_series(args.input, args.center)
    names = _track_list(series, args.tracks)
    emit = Emitter(args.output)
    reports = {}
    reports["y"] = calibration.lobato_velasco(series.y)
    for name in names:
        x = series.track(name)
        reports[name] = calibration.lobato_velasco(x)
        reports[f"error_{name}"] = calibration.lobato_velasco(series.y - x)
    lines = ["series,statistic,p_value"]
    for label, rep in reports.items():
        lines.append(f"{label},{rep.statistic:.6f},{rep.p_value:.6f}")
        print(f"{label}: statistic {rep.statistic:.6f}, p = {rep.p_value:.6f}")
    emit.write("normality.csv", "\n".join(lines) + "\n")
    emit.write(
        "normality.json",
        json.dumps({k: json.loads(v.to_json()) for k, v in reports.items()}, indent=2)
        + "\n",
    )
    emit.manifest(
        "normality",
        {
            "input": args.input,
            "tracks": ",".join(names),
            "center": args.center,
            "output": args.output,
        },
    )


def cmd_simulate(args) -> None:
    spec_text = Path(args.scenario).read_text(encoding="utf-8")
    spec = simulate.ScenarioSpec.from_json(spec_text)
    if args.seed != DEFAULT_SEED:
        spec = simulate.ScenarioSpec(
            kind=spec.kind, parameters=spec.parameters, n=spec.n, seed=args.seed
        )
    series = simulate.generate(spec)
    emit = Emitter(args.output)
    emit.write("series.csv", series.to_csv())
    emit.manifest(
        "simulate",
        {"scenario": args.scenario, "seed": spec.seed, "output": args.output},
    )
    print(f"wrote {series.n} rows, tracks {series.track_names}")


def cmd_replay(args) -> None:
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    command = manifest["command"]
    params = manifest["parameters"]
    argv = [command]
    for key, value in params.items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    main(argv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="domscore",
        description="Forecast dominance analysis under consistent scoring functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, input_required=True):
        if input_required:
            p.add_argument("--input", required=True, help="input CSV path")
        p.add_argument("--output", required=True, help="output directory")
        p.add_argument("--tracks", help="comma-separated track names")
        p.add_argument(
            "--center", action="store_true", help="demean forecasts and realizations"
        )
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("murphy", help="Murphy diagrams and score differences")
    common(p)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--theta-grid", help="override knot grid as lo:hi:count")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_murphy)

    p = sub.add_parser("mz", help="calibration regression with HAC Wald test")
    common(p)
    p.add_argument("--bandwidth", type=int, default=None)
    p.set_defaults(func=cmd_mz)

    p = sub.add_parser("gauss", help="Gaussian dominance classification table")
    common(p)
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("convex-order", help="integrated-CDF and subsampling test")
    common(p)
    p.add_argument("--b-grid", help="comma-separated subsample sizes")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_convex_order)

    p = sub.add_parser("dominance", help="stationary-bootstrap dominance test")
    common(p)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument(
        "--replications", type=int, default=bootstrap.DEFAULT_REPLICATIONS
    )
    p.add_argument("--block-mean", type=float, default=None)
    p.set_defaults(func=cmd_dominance)

    p = sub.add_parser("normality", help="Gaussianity tests per series")
    common(p)
    p.set_defaults(func=cmd_normality)

    p = sub.add_parser("simulate", help="generate a scenario as CSV")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_replay)

    return parser


def _emit_error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")


def main(argv=None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _INPUT_ERRORS as exc:
        _emit_error(type(exc).__name__, str(exc))
        raise SystemExit(EXIT_INPUT_ERROR)
    except DomscoreError as exc:
        _emit_error(type(exc).__name__, str(exc))
        raise SystemExit(EXIT_STAT_ERROR)


if __name__ == "__main__":
    main()
