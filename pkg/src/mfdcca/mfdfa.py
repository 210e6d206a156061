"""Single-series multifractal detrended fluctuation analysis.

Pipeline: profile -> per-segment detrended variances at every scale ->
q-th order fluctuation table -> log-log scaling fit -> singularity spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _moments, kernels
from .core import (
    FluctuationTable,
    Profile,
    QGrid,
    ScaleGrid,
    ScalingFit,
    SingularitySpectrum,
    SpectrumParams,
    as_series,
    build_profile,
    default_q_grid,
    fit_scaling,
    legendre_transform,
    make_scale_grid,
    spectrum_params,
)
from .detrend import DetrendConfig, fit_trend

__all__ = ["MfdfaResult", "detrended_variance", "mfdfa", "try_spectrum"]

ALGORITHM_MFDFA = "MFDFA"


@dataclass(frozen=True)
class MfdfaResult:
    fluctuations: FluctuationTable
    fit: ScalingFit
    spectrum: SingularitySpectrum | None

    @property
    def params(self) -> SpectrumParams | None:
        return self.spectrum.params if self.spectrum is not None else None


def try_spectrum(fit: ScalingFit) -> SingularitySpectrum | None:
    """Spectrum with shape parameters, or None when tau is too sparse."""
    if int(np.isfinite(fit.tau).sum()) < 3:
        return None
    spec = legendre_transform(fit)
    return SingularitySpectrum(spec.qs, spec.alpha, spec.f_alpha, spectrum_params(spec))


def detrended_variance(profile: Profile | np.ndarray, scale: int, segment_index: int,
                       config: DetrendConfig = DetrendConfig()) -> float:
    """Mean squared residual of one segment's trend fit; segment_index from 1."""
    values = profile.values if isinstance(profile, Profile) else np.asarray(profile, float)
    count = len(values) // scale
    if not 1 <= segment_index <= count:
        raise ValueError(f"segment_index {segment_index} outside 1..{count}")
    seg = values[(segment_index - 1) * scale: segment_index * scale]
    res = seg - fit_trend(seg, config)
    return float(res @ res / scale)


def mfdfa(series, scales: ScaleGrid | None = None, qs: QGrid | None = None,
          config: DetrendConfig = DetrendConfig()) -> MfdfaResult:
    """Run the full single-series analysis.

    Scales default to a 30-point log grid on [4, N/4]; moment orders default
    to -10..10 in steps of 0.25.  Segments whose variance is exactly zero are
    excluded from q <= 0 averages (they would diverge) and counted in the
    table's per-cell diagnostics.
    """
    s = as_series(series)
    n_samples = len(s)
    if scales is None:
        scales = make_scale_grid(n_samples)
    if qs is None:
        qs = default_q_grid()
    if config.poly_order + 1 >= scales.min_scale:
        raise ValueError(
            f"poly_order {config.poly_order} needs segments longer than "
            f"{config.poly_order + 1}; min scale is {scales.min_scale}"
        )
    profile = build_profile(s)
    n_q = len(qs)
    n_s = scales.count
    values = np.full((n_s, n_q), np.nan)
    valid = np.zeros((n_s, n_q), dtype=bool)
    reason = np.full((n_s, n_q), "", dtype=object)
    excluded = np.zeros((n_s, n_q), dtype=np.int64)
    for i, scale in enumerate(scales.scales):
        stats = kernels.pair_segment_stats(profile.values, profile.values,
                                           int(scale), config.poly_order)
        col = _moments.positive_moments(stats.cov, qs.q_values)
        values[i], valid[i], reason[i], excluded[i] = col
    table = FluctuationTable(ALGORITHM_MFDFA, scales.scales, qs.q_values,
                             values, valid, reason, excluded)
    fit = fit_scaling(table)
    return MfdfaResult(fluctuations=table, fit=fit, spectrum=try_spectrum(fit))
