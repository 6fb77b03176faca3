"""Pointwise consistent scoring functions for mean and expectile forecasts.

Covers the named Bregman-family scores (squared error, Bernoulli log loss,
QLIKE, Poisson) and the elementary scores indexed by a threshold theta.
All scores are negatively oriented penalties: smaller is better.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import BadTau, DomainViolation, EmptySample

EXPECTILE_TOL = 1e-10


class ScoreKind(enum.Enum):
    SQUARED_ERROR = "squared_error"
    BERNOULLI_LOG_LOSS = "bernoulli_log_loss"
    QLIKE = "qlike"
    POISSON = "poisson"
    ELEMENTARY_MEAN = "elementary_mean"
    ELEMENTARY_EXPECTILE = "elementary_expectile"


BREGMAN_KINDS = frozenset(
    {
        ScoreKind.SQUARED_ERROR,
        ScoreKind.BERNOULLI_LOG_LOSS,
        ScoreKind.QLIKE,
        ScoreKind.POISSON,
    }
)
ELEMENTARY_KINDS = frozenset(
    {ScoreKind.ELEMENTARY_MEAN, ScoreKind.ELEMENTARY_EXPECTILE}
)

# Admissible (forecast, realization) domains per score family.
# Intervals are (low, high, low_open, high_open); None means unbounded.
_DOMAINS = {
    ScoreKind.SQUARED_ERROR: ((None, None, True, True), (None, None, True, True)),
    ScoreKind.BERNOULLI_LOG_LOSS: ((0.0, 1.0, True, True), (0.0, 1.0, False, False)),
    ScoreKind.QLIKE: ((0.0, None, True, True), (0.0, None, False, True)),
    ScoreKind.POISSON: ((0.0, None, True, True), (0.0, None, False, True)),
}


def _in_interval(v: float, iv) -> bool:
    lo, hi, lo_open, hi_open = iv
    if lo is not None and (v < lo or (lo_open and v == lo)):
        return False
    if hi is not None and (v > hi or (hi_open and v == hi)):
        return False
    return True


@dataclass(frozen=True)
class ScoreSpec:
    """A consistent scoring function: Bregman family member or elementary score."""

    kind: ScoreKind
    theta: float | None = None
    tau: float | None = None

    def __post_init__(self):
        if self.kind in ELEMENTARY_KINDS:
            if self.theta is None or not math.isfinite(self.theta):
                raise DomainViolation("elementary scores require a finite theta")
            if self.kind is ScoreKind.ELEMENTARY_MEAN:
                object.__setattr__(self, "tau", 0.5)
            elif self.tau is None:
                raise BadTau("elementary expectile score requires tau")
        if self.tau is not None and not (0.0 < self.tau < 1.0):
            raise BadTau(f"tau must lie in (0, 1), got {self.tau}")
        if self.theta is not None and not math.isfinite(self.theta):
            raise DomainViolation("theta must be finite")


@dataclass(frozen=True)
class ScoreValue:
    """A realized score: a finite, negatively oriented penalty."""

    value: float


def _check_domain(kind: ScoreKind, x: float, y: float) -> None:
    dom_x, dom_y = _DOMAINS[kind]
    if not _in_interval(x, dom_x):
        raise DomainViolation(f"forecast {x} outside admissible range for {kind.value}")
    if not _in_interval(y, dom_y):
        raise DomainViolation(
            f"realization {y} outside admissible range for {kind.value}"
        )


def bregman_score(spec: ScoreSpec, x: float, y: float) -> ScoreValue:
    """Evaluate a named Bregman-family score at forecast x and realization y.

    The Bernoulli, QLIKE and Poisson scores use the form with the convex
    generator evaluated at y subtracted, so realizations on the closed
    boundary of their range (y = 0, or y in {0, 1}) are admissible.
    """
    if spec.kind not in BREGMAN_KINDS:
        raise DomainViolation(f"{spec.kind.value} is not a Bregman family member")
    _check_domain(spec.kind, x, y)
    if spec.kind is ScoreKind.SQUARED_ERROR:
        v = (y - x) ** 2
    elif spec.kind is ScoreKind.BERNOULLI_LOG_LOSS:
        v = -y * math.log(x) - (1.0 - y) * math.log(1.0 - x)
    elif spec.kind is ScoreKind.QLIKE:
        v = math.log(x) + y / x - 1.0
    else:  # Poisson
        v = -y * math.log(x) + x
    return ScoreValue(float(v))


def elementary_score(spec: ScoreSpec, x: float, y: float) -> ScoreValue:
    """Elementary score |1{y < theta} - tau| (theta - y) 1{x > theta}.

    The indicator on the forecast is strict: ties x == theta score zero.
    For the mean (tau = 1/2) this is (1/2)(theta - y) 1{x > theta}.
    """
    if spec.kind not in ELEMENTARY_KINDS:
        raise DomainViolation(f"{spec.kind.value} is not an elementary score")
    theta, tau = spec.theta, spec.tau
    if x <= theta:
        return ScoreValue(0.0)
    weight = (1.0 - tau) if y < theta else tau
    return ScoreValue(float(weight * (theta - y)))


def score(spec: ScoreSpec, x: float, y: float) -> ScoreValue:
    """Dispatch to the Bregman or elementary evaluator based on spec.kind."""
    if spec.kind in BREGMAN_KINDS:
        return bregman_score(spec, x, y)
    return elementary_score(spec, x, y)


def expectile_bregman_score(tau: float, x: float, y: float) -> float:
    """Consistent expectile score |1{y < x} - tau| (y - x)^2 (generator z^2)."""
    if not (0.0 < tau < 1.0):
        raise BadTau(f"tau must lie in (0, 1), got {tau}")
    weight = (1.0 - tau) if y < x else tau
    return float(weight * (y - x) ** 2)


def mean_functional(sample) -> float:
    """Arithmetic mean of a nonempty sample."""
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise EmptySample("mean of an empty sample is undefined")
    return float(arr.mean())


def _expectile_identity(t: float, arr: np.ndarray, tau: float) -> float:
    """(1-tau) E[(t-Y)_+] - tau E[(Y-t)_+]; increasing in t, root = expectile."""
    below = np.maximum(t - arr, 0.0)
    above = np.maximum(arr - t, 0.0)
    return float((1.0 - tau) * below.mean() - tau * above.mean())


def expectile(sample, tau: float) -> float:
    """Empirical expectile at level tau.

    Root of the two-sided balance identity, located by bisection on
    [min(sample), max(sample)] to EXPECTILE_TOL, then one Newton polish.
    tau = 1/2 recovers the mean.
    """
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise EmptySample("expectile of an empty sample is undefined")
    if not (0.0 < tau < 1.0):
        raise BadTau(f"tau must lie in (0, 1), got {tau}")
    lo, hi = float(arr.min()), float(arr.max())
    if lo == hi:
        return lo
    while hi - lo > EXPECTILE_TOL:
        mid = 0.5 * (lo + hi)
        if _expectile_identity(mid, arr, tau) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    # One Newton step: the identity has slope (1-tau) F(t) + tau (1 - F(t)).
    frac_below = float(np.mean(arr <= t))
    slope = (1.0 - tau) * frac_below + tau * (1.0 - frac_below)
    if slope > 0.0:
        t -= _expectile_identity(t, arr, tau) / slope
    return float(min(max(t, float(arr.min())), float(arr.max())))
