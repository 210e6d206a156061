"""Multifractal detrended fluctuation and cross-correlation analysis.

Single-series MFDFA plus eleven cross-correlation estimators that differ in
how they treat negative residual covariances, validated against the exactly
solvable binomial cascade.  See :func:`mfdfa.mfdfa` and :func:`xcorr.run_all`
for the two main entry points, and the ``mfdcca`` CLI for file-based runs.
"""

__version__ = "0.1.0"

from .binomial import CascadeSpec, analytic, generate
from .core import (
    FluctuationTable,
    Profile,
    QGrid,
    ScaleGrid,
    ScalingFit,
    SingularitySpectrum,
    SpectrumParams,
    TimeSeries,
    build_profile,
    default_q_grid,
    fit_scaling,
    legendre_transform,
    make_scale_grid,
    spectrum_params,
)
from .detrend import DetrendConfig, SegmentResiduals, SignedCovStats, fit_trend, segment_bounds, signed_cov_stats
from .mfdfa import MfdfaResult, detrended_variance, mfdfa
from .xcorr import (
    Algorithm,
    AlgorithmResult,
    PairCoverage,
    XcorrResult,
    detrended_covariance,
    run_all,
)

__all__ = [
    "__version__",
    "Algorithm",
    "AlgorithmResult",
    "CascadeSpec",
    "DetrendConfig",
    "FluctuationTable",
    "MfdfaResult",
    "PairCoverage",
    "Profile",
    "QGrid",
    "ScaleGrid",
    "ScalingFit",
    "SegmentResiduals",
    "SignedCovStats",
    "SingularitySpectrum",
    "SpectrumParams",
    "TimeSeries",
    "XcorrResult",
    "analytic",
    "build_profile",
    "default_q_grid",
    "detrended_covariance",
    "detrended_variance",
    "fit_scaling",
    "fit_trend",
    "generate",
    "legendre_transform",
    "make_scale_grid",
    "mfdfa",
    "run_all",
    "segment_bounds",
    "signed_cov_stats",
    "spectrum_params",
]
