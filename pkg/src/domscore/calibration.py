"""Calibration diagnostics: MZ regression with HAC errors, moment summaries,
the common-information testable implications, and an autocorrelation-robust
Gaussianity test.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .exceptions import (
    DegenerateRegressor,
    TooFewEffectiveObservations,
    TooFewObservations,
    UnknownTrack,
)
from .series import PairedSeries


@dataclass(frozen=True)
class MZFit:
    """Mincer-Zarnowitz fit of y on (1, x) with HAC-based Wald test of (0, 1)."""

    alpha: float
    beta: float
    r_squared: float
    se_alpha: float
    se_beta: float
    wald_stat: float
    wald_pvalue: float
    n: int
    bandwidth: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.alpha,
                "beta": self.beta,
                "r_squared": self.r_squared,
                "se_alpha": self.se_alpha,
                "se_beta": self.se_beta,
                "wald_stat": self.wald_stat,
                "wald_pvalue": self.wald_pvalue,
                "n": self.n,
                "bandwidth": self.bandwidth,
            }
        )


@dataclass(frozen=True)
class TrackMoments:
    mse: float
    sigma: float
    beta: float
    fourth_moment: float


@dataclass(frozen=True)
class MomentTable:
    """Per-track MSE, spread, calibration slope and raw fourth moment."""

    sigma_y: float
    per_track: dict[str, TrackMoments]
    means: dict[str, float]
    mean_y: float
    centered: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "sigma_y": self.sigma_y,
                "mean_y": self.mean_y,
                "centered": self.centered,
                "tracks": {
                    k: {
                        "mse": m.mse,
                        "sigma": m.sigma,
                        "beta": m.beta,
                        "fourth_moment": m.fourth_moment,
                        "mean": self.means[k],
                    }
                    for k, m in self.per_track.items()
                },
            }
        )

    def to_text(self) -> str:
        names = list(self.per_track)
        rows = [
            ("mse", [self.per_track[t].mse for t in names]),
            ("sigma", [self.per_track[t].sigma for t in names]),
            ("beta", [self.per_track[t].beta for t in names]),
            ("fourth_moment", [self.per_track[t].fourth_moment for t in names]),
        ]
        width = max(14, *(len(t) + 2 for t in names))
        buf = io.StringIO()
        buf.write(f"sigma_y = {self.sigma_y:.6f}\n")
        buf.write(" " * 14 + "".join(f"{t:>{width}}" for t in names) + "\n")
        for label, vals in rows:
            buf.write(
                f"{label:<14}" + "".join(f"{v:>{width}.6f}" for v in vals) + "\n"
            )
        return buf.getvalue()


def hac_covariance(moments: np.ndarray, bandwidth: int) -> np.ndarray:
    """Bartlett-kernel long-run covariance of the moment condition rows.

    At bandwidth 0 this reduces to the heteroscedasticity-only estimator
    (the plain outer-product average).
    """
    n = moments.shape[0]
    s = moments.T @ moments / n
    for j in range(1, bandwidth + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        gamma = moments[j:].T @ moments[:-j] / n
        s += w * (gamma + gamma.T)
    return s


def newey_west_bandwidth(moments: np.ndarray, weights: np.ndarray) -> int:
    """Automatic Bartlett-kernel lag choice via the plug-in rule.

    Collapses the moment conditions with the weight vector, estimates the
    low-order spectral quantities with a pilot truncation 4 (n/100)^(2/9),
    and returns floor(1.1447 ((s1/s0)^2 n)^(1/3)).
    """
    n = moments.shape[0]
    h = moments @ weights
    pilot = int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))
    pilot = max(0, min(pilot, n - 1))
    sigma = np.empty(pilot + 1)
    for j in range(pilot + 1):
        sigma[j] = np.dot(h[j:], h[: n - j]) / n
    s0 = sigma[0] + 2.0 * sigma[1:].sum()
    s1 = 2.0 * np.dot(np.arange(1, pilot + 1), sigma[1:])
    if s0 <= 0.0:
        return 0
    gamma = 1.1447 * ((s1 / s0) ** 2) ** (1.0 / 3.0)
    return int(min(math.floor(gamma * n ** (1.0 / 3.0)), n - 1))


def mz_regression(
    series: PairedSeries, track: str, bandwidth: int | None = None
) -> MZFit:
    """OLS of y on (1, x) with HAC standard errors and an auto-calibration Wald test.

    The null (alpha, beta) = (0, 1) is tested against chi-squared(2). The
    Bartlett bandwidth defaults to the automatic plug-in choice.
    """
    x = series.track(track)
    y = series.y
    n = series.n
    if n < 3:
        raise TooFewObservations(f"MZ regression needs n >= 3, got {n}")
    if np.ptp(x) == 0.0:
        raise DegenerateRegressor(f"track {track!r} has zero variance")
    design = np.column_stack((np.ones(n), x))
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    moments = design * resid[:, None]
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(moments, np.array([0.0, 1.0]))
    bandwidth = int(bandwidth)
    xtx_inv = np.linalg.inv(design.T @ design)
    s = hac_covariance(moments, bandwidth)
    cov = xtx_inv @ (n * s) @ xtx_inv
    r = coef - np.array([0.0, 1.0])
    try:
        wald = float(r @ np.linalg.solve(cov, r))
    except np.linalg.LinAlgError:
        wald = 0.0 if np.allclose(r, 0.0) else math.inf
    wald = max(wald, 0.0)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return MZFit(
        alpha=float(coef[0]),
        beta=float(coef[1]),
        r_squared=min(max(r2, 0.0), 1.0),
        se_alpha=float(math.sqrt(max(cov[0, 0], 0.0))),
        se_beta=float(math.sqrt(max(cov[1, 1], 0.0))),
        wald_stat=wald,
        wald_pvalue=float(chi2.sf(wald, df=2)),
        n=n,
        bandwidth=bandwidth,
    )


def moment_table(series: PairedSeries, centered: bool = False) -> MomentTable:
    """Per-track MSE, spread, MZ slope and raw fourth moment.

    With ``centered`` the forecasts and realizations are demeaned first.
    Spreads use the population normalization (divide by n) so the Jensen
    relation E[X^4] >= sigma^4 holds exactly for centered data.
    """
    if series.n < 2:
        raise TooFewObservations("moment table needs n >= 2")
    if centered:
        series = series.centered()
    y = series.y
    per_track = {}
    means = {}
    for name, x in series.tracks.items():
        var_x = float(np.var(x))
        if var_x > 0.0:
            beta = float(np.cov(x, y, bias=True)[0, 1] / var_x)
        else:
            beta = math.nan
        per_track[name] = TrackMoments(
            mse=float(np.mean((y - x) ** 2)),
            sigma=math.sqrt(var_x),
            beta=beta,
            fourth_moment=float(np.mean(x**4)),
        )
        means[name] = float(x.mean())
    return MomentTable(
        sigma_y=float(np.std(y)),
        per_track=per_track,
        means=means,
        mean_y=float(y.mean()),
        centered=centered,
    )


@dataclass(frozen=True)
class ImplicationReport:
    """Pass/fail record of the three common-information implications."""

    equal_means: bool
    mean_difference: float
    mean_difference_se: float
    slopes_below_one: bool
    beta_a: float
    beta_b: float
    moments_ordered: bool
    second_moment_a: float
    second_moment_b: float
    fourth_moment_a: float
    fourth_moment_b: float

    @property
    def all_pass(self) -> bool:
        return self.equal_means and self.slopes_below_one and self.moments_ordered

    def failing(self) -> list[str]:
        out = []
        if not self.equal_means:
            out.append("equal_means")
        if not self.slopes_below_one:
            out.append("slopes_below_one")
        if not self.moments_ordered:
            out.append("moments_ordered")
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "all_pass": self.all_pass,
                "failing": self.failing(),
                "equal_means": self.equal_means,
                "mean_difference": self.mean_difference,
                "mean_difference_se": self.mean_difference_se,
                "slopes_below_one": self.slopes_below_one,
                "beta_a": self.beta_a,
                "beta_b": self.beta_b,
                "moments_ordered": self.moments_ordered,
                "second_moment_a": self.second_moment_a,
                "second_moment_b": self.second_moment_b,
                "fourth_moment_a": self.fourth_moment_a,
                "fourth_moment_b": self.fourth_moment_b,
            }
        )


def prop52_check(
    series: PairedSeries, track_a: str, track_b: str, centered: bool = False
) -> ImplicationReport:
    """Check the testable implications of A-dominates-B under common information.

    (a) equal means of both tracks (within two standard errors of the paired
    mean difference), (b) both calibration slopes <= 1, (c) even moments of
    B at least as large as those of A for k in {1, 2}.
    """
    a = series.track(track_a)
    b = series.track(track_b)
    if centered:
        series = series.centered()
        a = series.track(track_a)
        b = series.track(track_b)
    table = moment_table(series, centered=False)
    ma, mb = table.per_track[track_a], table.per_track[track_b]
    diff = a - b
    mean_diff = float(diff.mean())
    se = float(diff.std(ddof=1) / math.sqrt(diff.size)) if diff.size > 1 else 0.0
    equal_means = abs(mean_diff) <= 2.0 * se or mean_diff == 0.0
    m2a = float(np.mean(a**2))
    m2b = float(np.mean(b**2))
    return ImplicationReport(
        equal_means=bool(equal_means),
        mean_difference=mean_diff,
        mean_difference_se=se,
        slopes_below_one=bool(ma.beta <= 1.0 and mb.beta <= 1.0),
        beta_a=ma.beta,
        beta_b=mb.beta,
        moments_ordered=bool(
            m2b >= m2a and mb.fourth_moment >= ma.fourth_moment
        ),
        second_moment_a=m2a,
        second_moment_b=m2b,
        fourth_moment_a=ma.fourth_moment,
        fourth_moment_b=mb.fourth_moment,
    )


@dataclass(frozen=True)
class TestReport:
    """Statistic, p-value and tuning metadata for a hypothesis test."""

    name: str
    statistic: float
    p_value: float
    n: int
    parameters: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "statistic": self.statistic,
                "p_value": self.p_value,
                "n": self.n,
                "parameters": self.parameters,
            }
        )


def _autocovariances(x: np.ndarray) -> np.ndarray:
    """All sample autocovariances gamma(0..n-1) via FFT, 1/n normalization."""
    n = x.size
    xc = x - x.mean()
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n] / n
    return acov


def lobato_velasco(sample) -> TestReport:
    """Skewness-kurtosis Gaussianity test robust to autocorrelation.

    The third central moment and the excess-kurtosis moment are studentized
    by full-sample sums of powered autocovariances; the statistic is
    asymptotically chi-squared(2) under a Gaussian stationary null. There
    are no tuning parameters.
    """
    x = np.asarray(sample, dtype=float)
    n = x.size
    if n < 30:
        raise TooFewObservations(f"Gaussianity test needs n >= 30, got {n}")
    if np.ptp(x) == 0.0:
        raise TooFewEffectiveObservations("sample has zero variance")
    xc = x - x.mean()
    mu2 = float(np.mean(xc**2))
    mu3 = float(np.mean(xc**3))
    mu4 = float(np.mean(xc**4))
    acov = _autocovariances(x)
    two_sided = np.concatenate((acov[:0:-1], acov))
    f3 = float(np.sum(two_sided**3))
    f4 = float(np.sum(two_sided**4))
    if f3 <= 0.0 or f4 <= 0.0:
        raise TooFewEffectiveObservations(
            "autocovariance normalizers are non-positive"
        )
    stat = n * (mu3**2 / (6.0 * f3) + (mu4 - 3.0 * mu2**2) ** 2 / (24.0 * f4))
    return TestReport(
        name="gaussianity",
        statistic=float(stat),
        p_value=float(chi2.sf(stat, df=2)),
        n=n,
    )
