"""Forecast dominance analysis under consistent scoring functions."""

from .bootstrap import (
    DominanceTestResult,
    StationaryBootstrapConfig,
    default_mean_block_length,
    dominance_test,
    stationary_bootstrap_indices,
)
from .calibration import (
    ImplicationReport,
    MomentTable,
    MZFit,
    TestReport,
    lobato_velasco,
    moment_table,
    mz_regression,
    prop52_check,
)
from .gaussian import (
    CaseLabel,
    CaseVerdict,
    GaussianPairParams,
    Verdict,
    VerdictMatrix,
    classify,
    classify_table,
    params_from_moments,
    psi_closed_form,
    score_difference,
)
from .murphy import (
    MurphyCurve,
    difference_integral,
    dominance_summary,
    empirical_psi,
    knot_grid,
    murphy_difference,
)
from .order import (
    IntegratedCdfCurve,
    SubsampleCurve,
    integrated_cdf_diff,
    subsampling_order_test,
)
from .scoring import (
    ScoreKind,
    ScoreSpec,
    ScoreValue,
    bregman_score,
    elementary_score,
    expectile,
    mean_functional,
)
from .series import PairedSeries
from .simulate import ScenarioSpec, generate

__all__ = [name for name in dir() if not name.startswith("_")]
