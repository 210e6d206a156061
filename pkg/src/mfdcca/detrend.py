"""Segmentation and per-segment polynomial detrending.

Profiles are cut into floor(N/n) contiguous segments from the start; the
trailing remainder is discarded.  The local trend in each segment is an
ordinary least-squares polynomial over segment-local abscissas (mapped onto
[-1, 1] internally, which leaves the fitted values unchanged but keeps the
basis well conditioned at large scales and orders).

Sign bookkeeping convention
---------------------------
Residual products are split into a plus class (product >= 0; exact zeros are
counted positive so the partition is deterministic) and a minus class.  The
quadrant partition classes a point as P when its residual is <= 0 (at or
below the local trend) and M when above, so PP collects pairs with both
profiles at/below trend, MM pairs with both above, and PM/MP the mixed
cases.  Quadrant counts always partition the segment: PP+PM+MP+MM = n.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DetrendConfig",
    "SegmentResiduals",
    "SignedCovStats",
    "segment_bounds",
    "fit_trend",
    "segment_residuals",
    "residual_matrix",
    "signed_cov_stats",
    "trend_basis",
]


@dataclass(frozen=True)
class DetrendConfig:
    """Polynomial order of the per-segment trend (default linear)."""

    poly_order: int = 1

    def __post_init__(self):
        if self.poly_order < 0:
            raise ValueError("poly_order must be non-negative")


@dataclass(frozen=True)
class SegmentResiduals:
    """Residuals of one segment's trend fit; segment_index starts at 1."""

    residuals: np.ndarray
    segment_index: int
    scale: int


@dataclass(frozen=True)
class SignedCovStats:
    """One segment's residual-product bookkeeping, accumulated in one pass.

    sum_minus is the (non-positive) sum of the negative products, so
    n * cov == sum_plus + sum_minus and the mean absolute product is
    (sum_plus - sum_minus) / n.
    """

    length: int
    cov: float
    n_plus: int
    n_minus: int
    sum_plus: float
    sum_minus: float
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    s_pp: float
    s_pm: float
    s_mp: float
    s_mm: float


def segment_bounds(n_samples: int, scale: int) -> list[tuple[int, int]]:
    """Inclusive 1-based (start, end) for each full segment of length scale."""
    if scale < 4:
        raise ValueError(f"scale must be at least 4, got {scale}")
    if scale > n_samples // 4:
        raise ValueError(
            f"scale {scale} exceeds N/4 = {n_samples // 4}; too few segments to average"
        )
    count = n_samples // scale
    return [(k * scale + 1, (k + 1) * scale) for k in range(count)]


@lru_cache(maxsize=128)
def trend_basis(scale: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """(design, pseudo-inverse) for polynomial fits on one segment length.

    Cached because every segment at a given scale shares the same abscissas.
    Both arrays are frozen to keep the cache safe.
    """
    if scale <= order + 1:
        raise ValueError(
            f"segment length {scale} must exceed poly_order + 1 = {order + 1}"
        )
    t = (2.0 * np.arange(1, scale + 1) - (scale + 1)) / max(scale - 1, 1)
    design = np.ascontiguousarray(np.polynomial.polynomial.polyvander(t, order))
    pinv = np.ascontiguousarray(np.linalg.pinv(design))
    design.flags.writeable = False
    pinv.flags.writeable = False
    return design, pinv


def fit_trend(segment, config: DetrendConfig = DetrendConfig()) -> np.ndarray:
    """Least-squares polynomial trend evaluated at the segment's points."""
    y = np.ascontiguousarray(segment, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("segment must be one-dimensional")
    design, pinv = trend_basis(len(y), config.poly_order)
    return design @ (pinv @ y)


def residual_matrix(profile_values: np.ndarray, scale: int,
                    config: DetrendConfig = DetrendConfig()) -> np.ndarray:
    """Residuals of every full segment at one scale, shape (N_n, scale).

    This is the single source of residuals for every backend: signs and
    magnitudes of near-zero residuals are evaluation-order sensitive, so
    computing them once keeps all downstream estimators backend-independent.
    """
    count = len(profile_values) // scale
    if count < 1:
        raise ValueError(f"profile of length {len(profile_values)} has no segment of {scale}")
    design, pinv = trend_basis(scale, config.poly_order)
    segs = profile_values[: count * scale].reshape(count, scale)
    return segs - (segs @ pinv.T) @ design.T


def segment_residuals(profile_values: np.ndarray, scale: int, segment_index: int,
                      config: DetrendConfig = DetrendConfig()) -> SegmentResiduals:
    """Residuals for one segment; segment_index starts at 1."""
    count = len(profile_values) // scale
    if not 1 <= segment_index <= count:
        raise ValueError(f"segment_index {segment_index} outside 1..{count}")
    start = (segment_index - 1) * scale
    seg = np.ascontiguousarray(profile_values[start:start + scale], dtype=np.float64)
    res = seg - fit_trend(seg, config)
    return SegmentResiduals(residuals=res, segment_index=segment_index, scale=scale)


def _res_values(res) -> np.ndarray:
    if isinstance(res, SegmentResiduals):
        return res.residuals
    return np.ascontiguousarray(res, dtype=np.float64)


def signed_cov_stats(res_x, res_y) -> SignedCovStats:
    """Single-pass signed decomposition of one segment's residual products."""
    rx = _res_values(res_x)
    ry = _res_values(res_y)
    if isinstance(res_x, SegmentResiduals) and isinstance(res_y, SegmentResiduals):
        if res_x.scale != res_y.scale or res_x.segment_index != res_y.segment_index:
            raise ValueError("residuals come from different segments")
    if len(rx) != len(ry):
        raise ValueError(f"residual length mismatch: {len(rx)} vs {len(ry)}")
    n = len(rx)
    if n == 0:
        raise ValueError("empty segment")
    prod = rx * ry
    plus = prod >= 0
    sum_plus = float(prod[plus].sum())
    sum_minus = float(prod[~plus].sum())
    x_p = rx <= 0
    y_p = ry <= 0
    pp = x_p & y_p
    pm = x_p & ~y_p
    mp = ~x_p & y_p
    mm = ~x_p & ~y_p
    return SignedCovStats(
        length=n,
        cov=(sum_plus + sum_minus) / n,
        n_plus=int(plus.sum()),
        n_minus=int(n - plus.sum()),
        sum_plus=sum_plus,
        sum_minus=sum_minus,
        n_pp=int(pp.sum()),
        n_pm=int(pm.sum()),
        n_mp=int(mp.sum()),
        n_mm=int(mm.sum()),
        s_pp=float(prod[pp].sum()),
        s_pm=float(prod[pm].sum()),
        s_mp=float(prod[mp].sum()),
        s_mm=float(prod[mm].sum()),
    )
