"""Shared domain types and the scaling/spectrum machinery.

Everything downstream (single-series and cross-correlation estimators) is
built from the pieces here: profile construction, the log-spaced scale grid,
the moment-order grid, per-(scale, q) fluctuation tables, the log-log scaling
regression, and the Legendre transform to the singularity spectrum.

All functions are pure and deterministic; nothing mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TimeSeries",
    "Profile",
    "ScaleGrid",
    "QGrid",
    "FluctuationTable",
    "ScalingFit",
    "SingularitySpectrum",
    "SpectrumParams",
    "as_series",
    "build_profile",
    "make_scale_grid",
    "default_q_grid",
    "fit_scaling",
    "legendre_transform",
    "spectrum_params",
]

MIN_SCALES_FOR_FIT = 5


def _validated_values(values, what: str = "series") -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{what} is empty")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValueError(f"{what} has a non-finite value at index {bad[0]}")
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """An ordered sequence of finite real samples with an optional label."""

    values: np.ndarray
    label: str = ""

    def __len__(self) -> int:
        return len(self.values)


def as_series(data, label: str = "") -> TimeSeries:
    """Coerce an array-like (or pass through a TimeSeries) with validation."""
    if isinstance(data, TimeSeries):
        if isinstance(data.values, np.ndarray) and data.values.dtype == np.float64:
            return data
        return TimeSeries(_validated_values(data.values, "series"), data.label)
    return TimeSeries(_validated_values(data, "series"), label)


@dataclass(frozen=True)
class Profile:
    """Cumulative sum of a mean-subtracted series; the signal being detrended."""

    values: np.ndarray
    source_length: int

    def __len__(self) -> int:
        return len(self.values)


def build_profile(series) -> Profile:
    """Integrate a series into its mean-subtracted cumulative profile.

    The final element is zero up to accumulated rounding, since the subtracted
    mean removes the total sum.
    """
    s = as_series(series)
    x = s.values
    return Profile(values=np.cumsum(x - x.mean()), source_length=len(x))


@dataclass(frozen=True)
class ScaleGrid:
    """Strictly increasing integer segment lengths, log-uniformly spaced."""

    scales: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scales, dtype=np.int64)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("scale grid must be a non-empty 1-D integer sequence")
        if not (np.diff(s) > 0).all():
            raise ValueError("scale grid must be strictly increasing")
        object.__setattr__(self, "scales", s)

    @property
    def min_scale(self) -> int:
        return int(self.scales[0])

    @property
    def max_scale(self) -> int:
        return int(self.scales[-1])

    @property
    def count(self) -> int:
        return len(self.scales)


def make_scale_grid(n_samples: int, min_scale: int = 4, max_scale: int | None = None,
                    points: int = 30) -> ScaleGrid:
    """Build a log-uniform integer scale grid between min_scale and max_scale.

    Endpoints are always included; interior points are rounded to the nearest
    integer and deduplicated.  max_scale defaults to n_samples // 4, the
    largest scale that still leaves four segments to average over.
    """
    if max_scale is None:
        max_scale = n_samples // 4
    if min_scale < 4:
        raise ValueError(f"min_scale must be at least 4, got {min_scale}")
    if max_scale <= min_scale:
        raise ValueError(f"max_scale ({max_scale}) must exceed min_scale ({min_scale})")
    if max_scale > n_samples // 4:
        raise ValueError(
            f"max_scale ({max_scale}) exceeds N/4 = {n_samples // 4}; "
            "fewer than four segments would remain for averaging"
        )
    if points < 2:
        raise ValueError("points must be at least 2")
    k = np.arange(points, dtype=np.float64)
    raw = min_scale * (max_scale / min_scale) ** (k / (points - 1))
    return ScaleGrid(np.unique(np.rint(raw).astype(np.int64)))


@dataclass(frozen=True)
class QGrid:
    """Strictly increasing moment orders; q = 0 uses the logarithmic average."""

    q_values: np.ndarray

    def __post_init__(self):
        q = np.ascontiguousarray(self.q_values, dtype=np.float64)
        if q.ndim != 1 or q.size == 0:
            raise ValueError("q grid must be a non-empty 1-D sequence")
        if not np.isfinite(q).all():
            raise ValueError("q grid values must be finite")
        if q.size > 1 and not (np.diff(q) > 0).all():
            raise ValueError("q grid must be strictly increasing")
        object.__setattr__(self, "q_values", q)

    def __len__(self) -> int:
        return len(self.q_values)


def default_q_grid(q_min: float = -10.0, q_max: float = 10.0, step: float = 0.25) -> QGrid:
    if step <= 0:
        raise ValueError("q step must be positive")
    count = int(round((q_max - q_min) / step))
    q = q_min + step * np.arange(count + 1)
    q = q[q <= q_max + 1e-12]
    return QGrid(q)


@dataclass(frozen=True)
class FluctuationTable:
    """F_q(n) over a (scale x q) grid with per-cell validity and diagnostics.

    values[i, j] is the fluctuation at scales[i], qs[j]; NaN when no numeric
    value exists.  Signed (negative) values can appear for algorithms that
    report them; those cells carry valid=False and a reason code, and are
    excluded from regressions.  excluded[i, j] counts segments dropped from
    the cell's average (zero-fluctuation segments at q <= 0).
    """

    algorithm: str
    scales: np.ndarray
    qs: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    reason: np.ndarray
    excluded: np.ndarray

    def cell(self, scale: int, q: float) -> tuple[float, bool, str]:
        i = int(np.flatnonzero(self.scales == scale)[0])
        j = int(np.flatnonzero(np.isclose(self.qs, q))[0])
        return float(self.values[i, j]), bool(self.valid[i, j]), str(self.reason[i, j])

    def column(self, q: float) -> tuple[np.ndarray, np.ndarray]:
        """(values, valid) across scales for one moment order."""
        j = int(np.flatnonzero(np.isclose(self.qs, q))[0])
        return self.values[:, j], self.valid[:, j]


@dataclass(frozen=True)
class ScalingFit:
    """Per-q OLS fit of log F_q(n) against log n, plus tau = q h(q) - 1."""

    algorithm: str
    qs: np.ndarray
    h: np.ndarray
    intercept: np.ndarray
    r_squared: np.ndarray
    n_scales_used: np.ndarray
    n_scales_excluded: np.ndarray
    tau: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.h)

    def h_at(self, q: float) -> float:
        j = np.flatnonzero(np.isclose(self.qs, q))
        return float(self.h[j[0]]) if j.size else float("nan")


def fit_scaling(table: FluctuationTable, min_scales: int = MIN_SCALES_FOR_FIT) -> ScalingFit:
    """Regress log F_q(n) on log n per q over the valid, positive cells.

    Cells that are invalid or non-positive are excluded and counted; a q with
    fewer than min_scales usable cells gets h(q) = NaN rather than aborting
    the run.
    """
    log_n = np.log(table.scales.astype(np.float64))
    n_q = len(table.qs)
    h = np.full(n_q, np.nan)
    intercept = np.full(n_q, np.nan)
    r2 = np.full(n_q, np.nan)
    used = np.zeros(n_q, dtype=np.int64)
    dropped = np.zeros(n_q, dtype=np.int64)
    for j in range(n_q):
        col = table.values[:, j]
        usable = table.valid[:, j] & np.isfinite(col) & (col > 0)
        used[j] = int(usable.sum())
        dropped[j] = len(col) - used[j]
        if used[j] < min_scales:
            continue
        x = log_n[usable]
        y = np.log(col[usable])
        slope, b = np.polyfit(x, y, 1)
        resid = y - (slope * x + b)
        ss_res = float(resid @ resid)
        ss_tot = float(((y - y.mean()) ** 2).sum())
        h[j] = slope
        intercept[j] = b
        r2[j] = 1.0 if ss_tot <= 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    tau = np.where(np.isfinite(h), table.qs * h - 1.0, np.nan)
    return ScalingFit(table.algorithm, table.qs, h, intercept, r2, used, dropped, tau)


@dataclass(frozen=True)
class SpectrumParams:
    """Shape parameters of a singularity spectrum.

    H is the Hurst exponent in the form conventionally tabulated for these
    estimators: the singularity strength at moment order 2, alpha(2).  For
    monofractal scaling alpha(q) is flat and H coincides with h(2).  width is
    alpha_max - alpha_min; skew is (alpha_max + alpha_min - 2 alpha0) / width,
    in [-1, 1] by construction, NaN when width is zero.
    """

    H: float
    alpha0: float
    width: float
    skew: float


@dataclass(frozen=True)
class SingularitySpectrum:
    """Points (q, alpha(q), f(alpha(q))) with optional shape parameters."""

    qs: np.ndarray
    alpha: np.ndarray
    f_alpha: np.ndarray
    params: SpectrumParams | None = None

    def __len__(self) -> int:
        return len(self.qs)


def legendre_transform(fit: ScalingFit) -> SingularitySpectrum:
    """Differentiate tau(q) into (alpha, f(alpha)).

    alpha is the central finite difference of tau over the retained q grid
    (one-sided at the ends); f = q alpha - tau holds identically at every
    point.  q values where tau is undefined are dropped first; at least three
    defined points are required.
    """
    keep = np.isfinite(fit.tau)
    if keep.sum() < 3:
        raise ValueError(
            f"tau(q) is defined on only {int(keep.sum())} q values; "
            "need at least 3 for differentiation"
        )
    q = fit.qs[keep]
    tau = fit.tau[keep]
    alpha = np.empty_like(tau)
    alpha[1:-1] = (tau[2:] - tau[:-2]) / (q[2:] - q[:-2])
    alpha[0] = (tau[1] - tau[0]) / (q[1] - q[0])
    alpha[-1] = (tau[-1] - tau[-2]) / (q[-1] - q[-2])
    return SingularitySpectrum(qs=q, alpha=alpha, f_alpha=q * alpha - tau)


def spectrum_params(spectrum: SingularitySpectrum) -> SpectrumParams:
    """Extract (H, alpha0, width, skew) from a spectrum.

    alpha0 is alpha at the maximum of f (ties resolved to the smallest alpha,
    making the output deterministic).  H is alpha at q = 2, NaN when q = 2 is
    not on the retained grid.  skew is NaN when the width is zero.
    """
    if len(spectrum) < 3:
        raise ValueError("spectrum needs at least 3 points for shape parameters")
    alpha = spectrum.alpha
    f = spectrum.f_alpha
    at_max = np.flatnonzero(f == f.max())
    alpha0 = float(alpha[at_max].min())
    a_min = float(alpha.min())
    a_max = float(alpha.max())
    width = a_max - a_min
    skew = (a_max + a_min - 2.0 * alpha0) / width if width > 0 else float("nan")
    j2 = np.flatnonzero(np.isclose(spectrum.qs, 2.0))
    h_rep = float(spectrum.alpha[j2[0]]) if j2.size else float("nan")
    return SpectrumParams(H=h_rep, alpha0=alpha0, width=width, skew=skew)
