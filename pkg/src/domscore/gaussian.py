"""Closed-form dominance analysis for jointly Gaussian forecast/realization pairs.

Each forecast j is described by the bivariate-normal parameters of (X_j, Y):
means, standard deviations, and the correlation rho_yj. Under a common mean
the expected elementary-score difference has a closed form, and a small set
of sufficient conditions (plus one necessary condition) classifies dominance.
"""

from __future__ import annotations

import enum
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .exceptions import CommonMeanViolation

_MEAN_TOL = 1e-12
CASE3_REL_TOL = 1e-9


@dataclass(frozen=True)
class GaussianPairParams:
    """Parameters of the bivariate normal distribution of (X_j, Y)."""

    mu_y: float
    mu_j: float
    sigma_j: float
    sigma_y: float
    rho_yj: float

    def __post_init__(self):
        if self.sigma_j <= 0 or self.sigma_y <= 0:
            raise ValueError("sigma_j and sigma_y must be positive")
        if not (-1.0 <= self.rho_yj <= 1.0):
            raise ValueError("rho_yj must lie in [-1, 1]")

    @property
    def beta(self) -> float:
        """Population slope of the calibration regression of Y on X_j."""
        return self.rho_yj * self.sigma_y / self.sigma_j


class Verdict(enum.Enum):
    A_DOMINATES = "A_dominates"
    B_DOMINATES = "B_dominates"
    NO_DOMINANCE_POSSIBLE = "NoDominancePossible"
    INDETERMINATE = "Indeterminate"


class CaseLabel(enum.Enum):
    CASE1 = "Case1"
    CASE2A = "Case2a"
    CASE2B = "Case2b"
    CASE3 = "Case3"
    CASE4 = "Case4"
    NECESSARY_FAIL = "NecessaryFail"
    NECESSARY_ONLY = "NecessaryOnly"


@dataclass(frozen=True)
class CaseVerdict:
    verdict: Verdict
    case_label: CaseLabel


def _check_common_mean(a: GaussianPairParams, b: GaussianPairParams) -> None:
    mus = (a.mu_y, a.mu_j, b.mu_y, b.mu_j)
    if max(mus) - min(mus) > _MEAN_TOL:
        raise CommonMeanViolation(
            f"common-mean assumption violated: mu values {mus} disagree"
        )


def psi_closed_form(params: GaussianPairParams, theta: float) -> float:
    """psi_j(theta) under joint normality with a common mean.

    2 psi_j(theta) = rho sigma_y phi(z) - (theta - mu)(1 - Phi(z)),
    z = (theta - mu) / sigma_j.
    """
    z = (theta - params.mu_y) / params.sigma_j
    val = params.rho_yj * params.sigma_y * norm.pdf(z) - (
        theta - params.mu_y
    ) * norm.sf(z)
    return 0.5 * float(val)


def score_difference(
    params_a: GaussianPairParams, params_b: GaussianPairParams, theta: float
) -> float:
    """Expected elementary-score difference E S_theta(X_B, Y) - E S_theta(X_A, Y).

    Positive values favor forecast A at this theta. Requires the common-mean
    assumption mu_Y = mu_A = mu_B.
    """
    _check_common_mean(params_a, params_b)
    mu = params_a.mu_y
    za = (theta - mu) / params_a.sigma_j
    zb = (theta - mu) / params_b.sigma_j
    return float(
        0.5
        * params_a.sigma_y
        * (params_a.rho_yj * norm.pdf(za) - params_b.rho_yj * norm.pdf(zb))
        + 0.5 * (theta - mu) * (norm.cdf(za) - norm.cdf(zb))
    )


def _sufficient_case(
    a: GaussianPairParams, b: GaussianPairParams
) -> CaseLabel | None:
    """First sufficient condition (if any) under which A dominates B."""
    sa, sb = a.sigma_j, b.sigma_j
    ba, bb = a.beta, b.beta
    # Case 1: higher spread, calibrated-or-better slope bracketing.
    if sa >= sb and bb <= 1.0 <= ba:
        return CaseLabel.CASE1
    if sa <= sb:
        # Case 2a: lower spread but stronger covariance with Y.
        if 0.0 <= ba <= 1.0 and 0.0 <= bb <= 1.0 and ba * sa * sa >= bb * sb * sb:
            return CaseLabel.CASE2A
        # Case 2b: competitor anticorrelated with Y.
        if bb <= 0.0 <= ba:
            return CaseLabel.CASE2B
    # Case 3: equal covariance with Y, both uncalibrated on the same side.
    cov_a, cov_b = ba * sa, bb * sb
    scale = max(abs(cov_a), abs(cov_b), 1.0)
    if abs(cov_a - cov_b) <= CASE3_REL_TOL * scale:
        if (ba > 1.0 and bb > 1.0) or (ba < 1.0 and bb < 1.0):
            if abs(ba - 1.0) <= abs(bb - 1.0):
                return CaseLabel.CASE3
    # Case 4: equal spread, higher slope wins.
    if sa == sb and ba >= bb:
        return CaseLabel.CASE4
    return None


def classify(
    params_a: GaussianPairParams, params_b: GaussianPairParams
) -> CaseVerdict:
    """Classify the directed comparison `does A dominate B?`.

    Checks the necessary condition rho_YA >= rho_YB first (the sign of the
    expected score difference at theta = mu_Y), then the sufficient cases
    for A over B, then the same cases with roles swapped.
    """
    _check_common_mean(params_a, params_b)
    if params_a.rho_yj < params_b.rho_yj:
        return CaseVerdict(Verdict.NO_DOMINANCE_POSSIBLE, CaseLabel.NECESSARY_FAIL)
    case = _sufficient_case(params_a, params_b)
    if case is not None:
        return CaseVerdict(Verdict.A_DOMINATES, case)
    case = _sufficient_case(params_b, params_a)
    if case is not None:
        return CaseVerdict(Verdict.B_DOMINATES, case)
    return CaseVerdict(Verdict.INDETERMINATE, CaseLabel.NECESSARY_ONLY)


def numerical_dominance_sweep(
    params_a: GaussianPairParams,
    params_b: GaussianPairParams,
    points: int = 401,
    width: float = 8.0,
) -> bool:
    """Advisory grid check: is the closed-form difference >= 0 throughout?

    Sweeps theta over mu_Y +/- width * max(sigma_A, sigma_B).
    """
    mu = params_a.mu_y
    span = width * max(params_a.sigma_j, params_b.sigma_j)
    thetas = np.linspace(mu - span, mu + span, points)
    diffs = [score_difference(params_a, params_b, t) for t in thetas]
    return bool(min(diffs) >= -1e-12)


_CELL = {
    Verdict.A_DOMINATES: "ok",
    Verdict.NO_DOMINANCE_POSSIBLE: "X",
    Verdict.B_DOMINATES: "?",
    Verdict.INDETERMINATE: "?",
}


@dataclass(frozen=True)
class VerdictMatrix:
    """Directed-pair by column matrix of dominance verdicts."""

    pairs: tuple[tuple[str, str], ...]
    columns: tuple[str, ...]
    verdicts: tuple[tuple[CaseVerdict, ...], ...]

    def cell(self, pair_idx: int, col_idx: int) -> str:
        """Table symbol: 'ok' sufficient-case hit, 'X' necessary-fail, '?' else."""
        return _CELL[self.verdicts[pair_idx][col_idx].verdict]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("pair," + ",".join(str(c) for c in self.columns) + "\n")
        for i, (a, b) in enumerate(self.pairs):
            cells = []
            for j in range(len(self.columns)):
                v = self.verdicts[i][j]
                symbol = self.cell(i, j)
                if v.verdict is Verdict.A_DOMINATES:
                    symbol += f"({v.case_label.value})"
                cells.append(symbol)
            buf.write(f"{a}>{b}," + ",".join(cells) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "columns": list(self.columns),
                "rows": [
                    {
                        "pair": f"{a}>{b}",
                        "cells": [
                            {
                                "symbol": self.cell(i, j),
                                "verdict": self.verdicts[i][j].verdict.value,
                                "case": self.verdicts[i][j].case_label.value,
                            }
                            for j in range(len(self.columns))
                        ],
                    }
                    for i, (a, b) in enumerate(self.pairs)
                ],
            }
        )


def classify_table(stats, pairs) -> VerdictMatrix:
    """Classify every directed pair across columns of parameter tables.

    ``stats`` maps column label (e.g. horizon) -> {track: GaussianPairParams};
    ``pairs`` is an ordered list of (track_a, track_b) directed comparisons.
    """
    columns = tuple(stats)
    pairs = tuple((a, b) for a, b in pairs)
    verdicts = []
    for a, b in pairs:
        row = []
        for col in columns:
            row.append(classify(stats[col][a], stats[col][b]))
        verdicts.append(tuple(row))
    return VerdictMatrix(pairs=pairs, columns=columns, verdicts=tuple(verdicts))


def params_from_moments(
    sigma_j: float, beta_j: float, sigma_y: float, mu: float = 0.0
) -> GaussianPairParams:
    """Build pair parameters from sample spread and calibration slope.

    Uses rho = beta * sigma_j / sigma_y, the inversion of the population
    slope identity.
    """
    rho = beta_j * sigma_j / sigma_y
    if not (-1.0 <= rho <= 1.0):
        rho = math.copysign(1.0, rho)
    return GaussianPairParams(
        mu_y=mu, mu_j=mu, sigma_j=sigma_j, sigma_y=sigma_y, rho_yj=rho
    )
