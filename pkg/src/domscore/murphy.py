"""Empirical psi-functions and Murphy diagrams over a theta knot grid.

The curve value at theta for track j is psi_hat_j(theta) = -(1/n) sum_i
S_theta(x_ji, y_i), with the elementary score from :mod:`domscore.scoring`.
Between data knots the curves are exactly piecewise linear, so evaluating
on the knot grid loses nothing.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .exceptions import BadTau, UnknownTrack
from .series import PairedSeries

_CSV_FMT = "%.17g"


@dataclass(frozen=True)
class MurphyCurve:
    """Mean elementary-score values (or differences) on a theta grid."""

    thetas: np.ndarray
    values: np.ndarray
    tau: float
    label: str
    se: np.ndarray | None = None

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if thetas.ndim != 1 or thetas.shape != values.shape:
            raise ValueError("thetas and values must be 1-d arrays of equal length")
        if np.any(np.diff(thetas) <= 0):
            raise ValueError("theta grid must be strictly increasing")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "values", values)
        if self.se is not None:
            se = np.asarray(self.se, dtype=float)
            if se.shape != thetas.shape:
                raise ValueError("se must match the theta grid")
            object.__setattr__(self, "se", se)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = "theta,value" + (",se" if self.se is not None else "")
        buf.write(cols + "\n")
        for i, th in enumerate(self.thetas):
            row = [_CSV_FMT % th, _CSV_FMT % self.values[i]]
            if self.se is not None:
                row.append(_CSV_FMT % self.se[i])
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "label": self.label,
            "tau": self.tau,
            "theta": self.thetas.tolist(),
            "value": self.values.tolist(),
        }
        if self.se is not None:
            payload["se"] = self.se.tolist()
        return json.dumps(payload)


@dataclass(frozen=True)
class DominanceSummary:
    max_violation: float
    violating_thetas: np.ndarray
    empirically_dominant: bool


def knot_grid(series: PairedSeries, tracks) -> np.ndarray:
    """Sorted union of forecast and realization values, plus two guard knots.

    The guard offset is one sample standard deviation of y, or 1 if that is
    degenerate (zero or undefined).
    """
    parts = [series.track(t) for t in tracks]
    parts.append(series.y)
    knots = np.unique(np.concatenate(parts))
    offset = float(np.std(series.y))
    if not np.isfinite(offset) or offset == 0.0:
        offset = 1.0
    return np.concatenate(([knots[0] - offset], knots, [knots[-1] + offset]))


def _score_moments(
    x: np.ndarray, y: np.ndarray, thetas: np.ndarray, strict: bool = True
):
    """Sufficient statistics for sums of elementary scores over a theta grid.

    Returns (N, T1, T2, C, R1, R2): counts and first/second y-moments over
    the sets {i: x_i > theta} and {i: x_i > theta, y_i < theta}. With
    ``strict=False`` the forecast condition is x_i >= theta, which yields
    the left limit in theta (the score is right-continuous with jumps at
    forecast knots).
    """
    n = x.size
    x_side = "right" if strict else "left"
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    suf1 = np.concatenate((np.cumsum(ys[::-1])[::-1], [0.0]))
    suf2 = np.concatenate((np.cumsum((ys * ys)[::-1])[::-1], [0.0]))
    k = np.searchsorted(xs, thetas, side=x_side)
    N = n - k
    T1 = suf1[k]
    T2 = suf2[k]

    # {x > theta, y < theta} = {y < theta} \ {x <= theta} within {y < x}.
    mask = y < x
    ye = np.sort(y[mask])
    pe1 = np.concatenate(([0.0], np.cumsum(ye)))
    pe2 = np.concatenate(([0.0], np.cumsum(ye * ye)))
    xo = np.argsort(x[mask], kind="stable")
    xe = x[mask][xo]
    yxe = y[mask][xo]
    qx1 = np.concatenate(([0.0], np.cumsum(yxe)))
    qx2 = np.concatenate(([0.0], np.cumsum(yxe * yxe)))
    a = np.searchsorted(ye, thetas, side="left")
    b = np.searchsorted(xe, thetas, side=x_side)
    C = a - b
    R1 = pe1[a] - qx1[b]
    R2 = pe2[a] - qx2[b]
    return N, T1, T2, C, R1, R2


def elementary_score_sums(
    x: np.ndarray, y: np.ndarray, thetas: np.ndarray, tau: float, strict: bool = True
) -> np.ndarray:
    """sum_i S_theta(x_i, y_i) for every theta on the grid, in O((n+m) log n)."""
    N, T1, _, C, R1, _ = _score_moments(x, y, thetas, strict=strict)
    return tau * (thetas * N - T1) + (1.0 - 2.0 * tau) * (thetas * C - R1)


class ScoreSumPlan:
    """Reusable sort/search layout for weighted elementary-score sums.

    The grid positions depend only on (x, y, thetas), so resampling rows
    reduces to new per-row weights; each evaluation is a handful of O(n)
    cumulative sums instead of a fresh sort. ``weighted_sums`` with the
    all-ones weight vector equals :func:`elementary_score_sums`.
    """

    def __init__(self, x, y, thetas, strict: bool = True):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        thetas = np.asarray(thetas, dtype=float)
        x_side = "right" if strict else "left"
        self.thetas = thetas
        self._x_order = np.argsort(x, kind="stable")
        xs = x[self._x_order]
        self._ys = y[self._x_order]
        self._k = np.searchsorted(xs, thetas, side=x_side)

        mask = y < x
        self._mask = mask
        ym = y[mask]
        self._y_order = np.argsort(ym, kind="stable")
        ye = ym[self._y_order]
        self._ye = ye
        xo = np.argsort(x[mask], kind="stable")
        self._xe_order = xo
        self._yxe = ym[xo]
        self._a = np.searchsorted(ye, thetas, side="left")
        self._b = np.searchsorted(x[mask][xo], thetas, side=x_side)

    def weighted_sums(self, weights: np.ndarray, tau: float) -> np.ndarray:
        """sum_i w_i S_theta(x_i, y_i) over the grid for nonnegative weights."""
        w = weights[self._x_order]
        cs = np.concatenate(([0.0], np.cumsum(w)))
        cs1 = np.concatenate(([0.0], np.cumsum(w * self._ys)))
        N = cs[-1] - cs[self._k]
        T1 = cs1[-1] - cs1[self._k]
        out = tau * (self.thetas * N - T1)
        if tau != 0.5:
            wm = weights[self._mask]
            py = np.concatenate(([0.0], np.cumsum(wm[self._y_order])))
            py1 = np.concatenate(([0.0], np.cumsum(wm[self._y_order] * self._ye)))
            px = np.concatenate(([0.0], np.cumsum(wm[self._xe_order])))
            px1 = np.concatenate(([0.0], np.cumsum(wm[self._xe_order] * self._yxe)))
            C = py[self._a] - px[self._b]
            R1 = py1[self._a] - px1[self._b]
            out += (1.0 - 2.0 * tau) * (self.thetas * C - R1)
        return out


def _weighted_square_sums(x, y, thetas, tau):
    """sum_i S_theta(x_i, y_i)^2 via the same sufficient statistics."""
    N, T1, T2, C, R1, R2 = _score_moments(x, y, thetas)
    full = thetas * thetas * N - 2.0 * thetas * T1 + T2
    below = thetas * thetas * C - 2.0 * thetas * R1 + R2
    return tau * tau * full + (1.0 - 2.0 * tau) * below


def _check_tau(tau: float) -> None:
    if not (0.0 < tau < 1.0):
        raise BadTau(f"tau must lie in (0, 1), got {tau}")


def empirical_psi(
    series: PairedSeries, track: str, thetas: np.ndarray, tau: float = 0.5
) -> MurphyCurve:
    """Empirical psi curve for one track: negated mean elementary score."""
    _check_tau(tau)
    x = series.track(track)
    thetas = np.asarray(thetas, dtype=float)
    sums = elementary_score_sums(x, series.y, thetas, tau)
    return MurphyCurve(thetas=thetas, values=-sums / series.n, tau=tau, label=track)


def murphy_difference(
    series: PairedSeries,
    track_a: str,
    track_b: str,
    tau: float = 0.5,
    thetas: np.ndarray | None = None,
    with_se: bool = False,
) -> MurphyCurve:
    """Mean elementary-score difference d_hat(theta) = mean S(x_A) - mean S(x_B).

    Track A empirically dominates B on the sample iff the curve is <= 0 at
    every grid theta. With ``with_se`` the pointwise standard error of the
    mean difference is attached.
    """
    _check_tau(tau)
    a = series.track(track_a)
    b = series.track(track_b)
    y = series.y
    n = series.n
    if thetas is None:
        thetas = knot_grid(series, [track_a, track_b])
    thetas = np.asarray(thetas, dtype=float)
    sums_a = elementary_score_sums(a, y, thetas, tau)
    sums_b = elementary_score_sums(b, y, thetas, tau)
    diff = (sums_a - sums_b) / n
    se = None
    if with_se:
        # (S_A - S_B)^2 summed over i: cross term lives on {min(a, b) > theta}.
        sq = (
            _weighted_square_sums(a, y, thetas, tau)
            + _weighted_square_sums(b, y, thetas, tau)
            - 2.0 * _weighted_square_sums(np.minimum(a, b), y, thetas, tau)
        )
        var = np.maximum(sq / n - diff * diff, 0.0)
        se = np.sqrt(var / n)
    return MurphyCurve(
        thetas=thetas, values=diff, tau=tau, label=f"{track_a}-{track_b}", se=se
    )


def difference_integral(
    series: PairedSeries,
    track_a: str,
    track_b: str,
    tau: float = 0.5,
    thetas: np.ndarray | None = None,
) -> float:
    """Exact integral of the score difference d_hat over theta.

    d_hat is linear on each open segment between knots but jumps at forecast
    knots (the indicator 1{x > theta} switches off exactly at theta = x), so
    a trapezoid over the knot values is not exact. Per segment the exact
    area is (right limit at the left knot + left limit at the right knot)/2
    times the width; outside the knot span the difference is zero.
    """
    _check_tau(tau)
    a = series.track(track_a)
    b = series.track(track_b)
    y = series.y
    if thetas is None:
        thetas = knot_grid(series, [track_a, track_b])
    thetas = np.asarray(thetas, dtype=float)
    right = (
        elementary_score_sums(a, y, thetas, tau)
        - elementary_score_sums(b, y, thetas, tau)
    ) / series.n
    left = (
        elementary_score_sums(a, y, thetas, tau, strict=False)
        - elementary_score_sums(b, y, thetas, tau, strict=False)
    ) / series.n
    widths = np.diff(thetas)
    return float(np.sum(0.5 * (right[:-1] + left[1:]) * widths))


def dominance_summary(curve: MurphyCurve) -> DominanceSummary:
    """Empirical dominance flag plus the size and location of violations."""
    violations = curve.values > 0.0
    max_violation = float(max(curve.values.max(), 0.0)) if curve.values.size else 0.0
    return DominanceSummary(
        max_violation=max_violation,
        violating_thetas=curve.thetas[violations],
        empirically_dominant=not bool(violations.any()),
    )
