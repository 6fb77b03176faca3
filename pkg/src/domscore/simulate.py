"""Seedable generators for the analytical comparison scenarios.

Every generator returns a :class:`PairedSeries` with tracks named ``A`` and
``B`` and is a deterministic function of its parameters and seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    NegativeSigma,
    NonStationary,
    NotPositiveDefinite,
    SingularDesign,
    UnsupportedDistribution,
)
from .gaussian import GaussianPairParams
from .series import PairedSeries

AR1_BURN_IN = 1000


def _component_sampler(dist: str, scale: float):
    """iid mean-zero component palette: normal, uniform, two-point."""
    if dist == "normal":
        return lambda rng, size: rng.normal(0.0, scale, size)
    if dist == "uniform":
        return lambda rng, size: rng.uniform(-scale, scale, size)
    if dist == "two_point":
        return lambda rng, size: scale * rng.choice([-1.0, 1.0], size=size)
    raise UnsupportedDistribution(
        f"unsupported component distribution {dist!r}; "
        "choose from normal, uniform, two_point"
    )


def gen_sum_components(
    dist: str = "normal", scale: float = 1.0, n: int = 1000, seed: int = 0
) -> PairedSeries:
    """Y is a sum of four iid mean-zero components; A sees two of them, B one.

    Both tracks are auto-calibrated by construction and A is greater in
    convex order, so A dominates B.
    """
    sampler = _component_sampler(dist, scale)
    rng = np.random.default_rng(seed)
    z = sampler(rng, (4, n))
    return PairedSeries(
        y=z.sum(axis=0), tracks={"A": z[0] + z[1], "B": z[2]}
    )


def gen_noisy_calibrated(
    sigma_zeta: float = 1.0, n: int = 1000, seed: int = 0
) -> PairedSeries:
    """A is a calibrated standard-normal forecast; B adds independent noise."""
    if sigma_zeta < 0:
        raise NegativeSigma("sigma_zeta must be nonnegative")
    rng = np.random.default_rng(seed)
    x_a = rng.normal(0.0, 1.0, n)
    eps = rng.normal(0.0, 1.0, n)
    zeta = rng.normal(0.0, sigma_zeta, n) if sigma_zeta > 0 else np.zeros(n)
    return PairedSeries(y=x_a + eps, tracks={"A": x_a, "B": x_a + zeta})


def gen_ar1_horizons(
    a: float = 0.9, sigma: float = 1.0, h: int = 2, n: int = 1000, seed: int = 0
) -> PairedSeries:
    """Stationary AR(1) realizations with one-step and h-step optimal forecasts.

    Track A = a * y_{t-1}, track B = a^h * y_{t-h}; both are auto-calibrated
    and A has the larger variance.
    """
    if not abs(a) < 1:
        raise NonStationary(f"AR(1) coefficient must satisfy |a| < 1, got {a}")
    if sigma < 0:
        raise NegativeSigma("sigma must be nonnegative")
    if h < 2:
        raise ValueError("horizon h must be >= 2")
    rng = np.random.default_rng(seed)
    total = AR1_BURN_IN + h + n
    path = np.empty(total)
    stat_sd = sigma / np.sqrt(1.0 - a * a) if sigma > 0 else 0.0
    path[0] = rng.normal(0.0, stat_sd) if stat_sd > 0 else 0.0
    eps = rng.normal(0.0, sigma, total - 1) if sigma > 0 else np.zeros(total - 1)
    for t in range(1, total):
        path[t] = a * path[t - 1] + eps[t - 1]
    start = AR1_BURN_IN + h
    return PairedSeries(
        y=path[start:],
        tracks={
            "A": a * path[start - 1 : -1],
            "B": (a**h) * path[start - h : total - h],
        },
    )


def gen_common_info_noise(
    w_dist: str = "normal",
    w_scale: float = 1.0,
    eps_sigma: float = 1.0,
    eta_a_sigma: float = 0.3,
    eta_b_sigma: float = 1.0,
    n: int = 1000,
    seed: int = 0,
) -> PairedSeries:
    """Both forecasts observe the same signal W plus centered Gaussian noise.

    With eta_a_sigma <= eta_b_sigma the ordered-noise hypothesis holds and A
    dominates B.
    """
    for name, s in (
        ("eps_sigma", eps_sigma),
        ("eta_a_sigma", eta_a_sigma),
        ("eta_b_sigma", eta_b_sigma),
    ):
        if s < 0:
            raise NegativeSigma(f"{name} must be nonnegative")
    sampler = _component_sampler(w_dist, w_scale)
    rng = np.random.default_rng(seed)
    w = sampler(rng, n)
    eps = rng.normal(0.0, eps_sigma, n) if eps_sigma > 0 else np.zeros(n)
    eta_a = rng.normal(0.0, eta_a_sigma, n) if eta_a_sigma > 0 else np.zeros(n)
    eta_b = rng.normal(0.0, eta_b_sigma, n) if eta_b_sigma > 0 else np.zeros(n)
    return PairedSeries(y=w + eps, tracks={"A": w + eta_a, "B": w + eta_b})


def _fit_linear(z, y, estimator) -> np.ndarray:
    name = estimator.get("name", "ols")
    if name == "ols":
        if np.linalg.matrix_rank(z) < z.shape[1]:
            raise SingularDesign("training design is rank-deficient")
        coef, *_ = np.linalg.lstsq(z, y, rcond=None)
        return coef
    if name == "ridge":
        lam = float(estimator.get("lam", 1.0))
        p = z.shape[1]
        return np.linalg.solve(z.T @ z + lam * np.eye(p), z.T @ y)
    raise UnsupportedDistribution(f"unknown estimator {name!r}")


def gen_linear_model(
    p: int = 5,
    n_train: int = 200,
    sigma_eps: float = 1.0,
    estimator_a: dict | None = None,
    estimator_b: dict | None = None,
    n_eval: int = 1000,
    seed: int = 0,
) -> PairedSeries:
    """Out-of-sample linear-model forecasts from two coefficient estimators.

    Draws a true coefficient vector and a Gaussian training set, fits both
    estimators, and evaluates on fresh rows. Each estimator is a dict with
    ``name`` in {ols, ridge}, optional ``lam`` (ridge penalty) and optional
    ``noise_scale`` which refits on a training response with independently
    rescaled noise (for more/less precise competitors).
    """
    estimator_a = estimator_a or {"name": "ols"}
    estimator_b = estimator_b or {"name": "ols"}
    if sigma_eps < 0:
        raise NegativeSigma("sigma_eps must be nonnegative")
    rng = np.random.default_rng(seed)
    beta = rng.normal(0.0, 1.0, p)
    z_train = rng.normal(0.0, 1.0, (n_train, p))
    base_noise = rng.normal(0.0, 1.0, n_train)

    def training_response(estimator):
        # Shared base noise, rescaled: a noisier competitor's coefficient
        # error is then a pathwise multiple of the cleaner one's.
        scale = float(estimator.get("noise_scale", 1.0)) * sigma_eps
        return z_train @ beta + base_noise * scale

    coef_a = _fit_linear(z_train, training_response(estimator_a), estimator_a)
    coef_b = _fit_linear(z_train, training_response(estimator_b), estimator_b)
    z0 = rng.normal(0.0, 1.0, (n_eval, p))
    eps0 = rng.normal(0.0, sigma_eps, n_eval) if sigma_eps > 0 else np.zeros(n_eval)
    return PairedSeries(
        y=z0 @ beta + eps0,
        tracks={"A": z0 @ coef_a, "B": z0 @ coef_b},
    )


def gen_gaussian_pair(
    params_a: GaussianPairParams,
    params_b: GaussianPairParams,
    cross_corr: float = 0.0,
    n: int = 1000,
    seed: int = 0,
) -> PairedSeries:
    """Trivariate Gaussian draw matching both pairwise (X_j, Y) blocks.

    The forecast cross-correlation completes the covariance; non-positive-
    definite assemblies are rejected, never repaired.
    """
    if params_a.sigma_y != params_b.sigma_y or params_a.mu_y != params_b.mu_y:
        raise ValueError("both parameter sets must share mu_y and sigma_y")
    sy = params_a.sigma_y
    sa, sb = params_a.sigma_j, params_b.sigma_j
    cov = np.array(
        [
            [sa * sa, cross_corr * sa * sb, params_a.rho_yj * sa * sy],
            [cross_corr * sa * sb, sb * sb, params_b.rho_yj * sb * sy],
            [params_a.rho_yj * sa * sy, params_b.rho_yj * sb * sy, sy * sy],
        ]
    )
    eigvals = np.linalg.eigvalsh(cov)
    if eigvals.min() < -1e-12 * max(eigvals.max(), 1.0):
        raise NotPositiveDefinite(
            f"covariance assembly has negative eigenvalue {eigvals.min():.3e}"
        )
    rng = np.random.default_rng(seed)
    mean = np.array([params_a.mu_j, params_b.mu_j, params_a.mu_y])
    draws = rng.multivariate_normal(mean, cov, size=n, method="svd")
    return PairedSeries(y=draws[:, 2], tracks={"A": draws[:, 0], "B": draws[:, 1]})


_GENERATORS = {
    "SumComponents": gen_sum_components,
    "NoisyCalibrated": gen_noisy_calibrated,
    "AR1Horizons": gen_ar1_horizons,
    "CommonInfoNoise": gen_common_info_noise,
    "LinearModelEstimation": gen_linear_model,
    "GaussianPair": None,  # handled specially: parameters carry nested params
}


@dataclass(frozen=True)
class ScenarioSpec:
    """A named scenario with kind-specific parameters, sample size and seed."""

    kind: str
    parameters: dict = field(default_factory=dict)
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _GENERATORS:
            raise UnsupportedDistribution(
                f"unknown scenario kind {self.kind!r}; "
                f"choose from {sorted(_GENERATORS)}"
            )
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @classmethod
    def from_json(cls, text: str) -> "ScenarioSpec":
        data = json.loads(text)
        return cls(
            kind=data["kind"],
            parameters=data.get("parameters", {}),
            n=int(data.get("n", 1000)),
            seed=int(data.get("seed", 0)),
        )


def generate(spec: ScenarioSpec) -> PairedSeries:
    """Generate the PairedSeries for a scenario specification."""
    if spec.kind == "GaussianPair":
        params = dict(spec.parameters)
        pa = GaussianPairParams(**params.pop("params_a"))
        pb = GaussianPairParams(**params.pop("params_b"))
        return gen_gaussian_pair(pa, pb, n=spec.n, seed=spec.seed, **params)
    gen = _GENERATORS[spec.kind]
    return gen(n=spec.n, seed=spec.seed, **spec.parameters)
