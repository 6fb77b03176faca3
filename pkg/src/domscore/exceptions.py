"""Exception types shared across the package."""


class DomscoreError(Exception):
    """Base class for all errors raised by this package."""


class DomainViolation(DomscoreError):
    """Forecast or realization falls outside the admissible range of a score."""


class EmptySample(DomscoreError):
    """An operation received an empty sample."""


class BadTau(DomscoreError):
    """Expectile level tau must lie strictly inside (0, 1)."""


class UnknownTrack(DomscoreError):
    """A named forecast track does not exist in the series."""


class CommonMeanViolation(DomscoreError):
    """Gaussian dominance analysis requires a common mean across forecasts and realizations."""


class TooFewObservations(DomscoreError):
    """Sample too small for the requested statistic."""


class TooFewEffectiveObservations(DomscoreError):
    """Sample is degenerate (e.g. zero variance) so the statistic is undefined."""


class DegenerateRegressor(DomscoreError):
    """Regressor has zero variance; OLS slope undefined."""


class BadSubsampleSize(DomscoreError):
    """Subsample size must satisfy 2 <= b <= n - 1."""


class UnsupportedDistribution(DomscoreError):
    """Requested component distribution is not in the supported palette."""


class NonStationary(DomscoreError):
    """AR(1) coefficient must satisfy |a| < 1."""


class NegativeSigma(DomscoreError):
    """Standard deviation parameters must be nonnegative."""


class NotPositiveDefinite(DomscoreError):
    """Requested joint covariance assembly is not positive semi-definite."""


class SingularDesign(DomscoreError):
    """Training design matrix is rank-deficient for OLS."""


class MalformedInput(DomscoreError):
    """Input file does not conform to the expected CSV schema."""
