"""Cross-correlation fluctuation estimators over a pair of series.

Eleven algorithms share one pass of per-segment residual statistics per
scale and differ only in how segment products are grouped before the
q-th-order average:

* MFDXA   - signed detrended covariances averaged directly.
* ABS     - per-segment mean absolute residual products.
* MFCCA   - sign of the covariance extracted before q-scaling, reapplied
            after the average.
* PS / MS - segments split by the sign of their covariance.
* PB / MB - positive and negative residue products split inside each
            segment.
* PP / PM / MP / MM - the per-point quadrant split (see
  :mod:`mfdcca.detrend` for the trend-side labelling convention).

Coverage bookkeeping records which fraction of point pairs each criterion
captures (segment-weighted for PS/MS); a criterion capturing under 10 % of
pairs is flagged low-coverage, since its spectrum is not trustworthy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _moments, kernels
from .core import (
    FluctuationTable,
    QGrid,
    ScaleGrid,
    ScalingFit,
    SingularitySpectrum,
    SpectrumParams,
    as_series,
    build_profile,
    default_q_grid,
    fit_scaling,
    make_scale_grid,
)
from .detrend import DetrendConfig, SignedCovStats, fit_trend
from .mfdfa import try_spectrum

__all__ = [
    "Algorithm",
    "Cell",
    "PairCoverage",
    "AlgorithmResult",
    "XcorrResult",
    "LOW_COVERAGE_PERCENT",
    "detrended_covariance",
    "fq_mfdxa",
    "fq_abs",
    "fq_mfcca",
    "fq_ps_ms",
    "fq_pb_mb",
    "fq_quadrants",
    "run_all",
]

LOW_COVERAGE_PERCENT = 10.0


class Algorithm(str, enum.Enum):
    """Closed set of cross-correlation estimators, in summary-table order."""

    MFDXA = "MFDXA"
    ABS = "ABS"
    MFCCA = "MFCCA"
    PS = "PS"
    MS = "MS"
    PB = "PB"
    MB = "MB"
    PP = "PP"
    PM = "PM"
    MP = "MP"
    MM = "MM"


class Cell(NamedTuple):
    """Outcome of one (scale, q) evaluation."""

    value: float
    valid: bool
    reason: str


@dataclass(frozen=True)
class PairCoverage:
    """Point pairs captured by an algorithm's criterion, over all scales."""

    captured: int
    total: int

    @property
    def percent(self) -> float:
        return 100.0 * self.captured / self.total if self.total else float("nan")


@dataclass(frozen=True)
class AlgorithmResult:
    algorithm: Algorithm
    table: FluctuationTable
    fit: ScalingFit
    spectrum: SingularitySpectrum | None
    coverage: PairCoverage

    @property
    def params(self) -> SpectrumParams | None:
        return self.spectrum.params if self.spectrum is not None else None

    @property
    def low_coverage(self) -> bool:
        return self.coverage.percent < LOW_COVERAGE_PERCENT


@dataclass(frozen=True)
class XcorrResult:
    """One AlgorithmResult per requested algorithm, plus the shared grids."""

    results: dict[Algorithm, AlgorithmResult]
    algorithms: tuple[Algorithm, ...]
    scales: ScaleGrid
    qs: QGrid
    config: DetrendConfig
    x_label: str
    y_label: str

    def __getitem__(self, key: Algorithm | str) -> AlgorithmResult:
        return self.results[Algorithm(key)]


def detrended_covariance(profile_x, profile_y, scale: int, segment_index: int,
                         config: DetrendConfig = DetrendConfig()) -> float:
    """Mean residual product of one segment; may be negative. 1-based index."""
    vx = getattr(profile_x, "values", profile_x)
    vy = getattr(profile_y, "values", profile_y)
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    if len(vx) != len(vy):
        raise ValueError("profiles differ in length")
    count = len(vx) // scale
    if not 1 <= segment_index <= count:
        raise ValueError(f"segment_index {segment_index} outside 1..{count}")
    lo = (segment_index - 1) * scale
    sx = vx[lo:lo + scale]
    sy = vy[lo:lo + scale]
    rx = sx - fit_trend(sx, config)
    ry = sy - fit_trend(sy, config)
    return float(rx @ ry / scale)


def _cell_from_column(column, qs: np.ndarray, q: float) -> Cell:
    values, valid, reason, _ = column
    j = int(np.flatnonzero(np.isclose(qs, q))[0])
    return Cell(float(values[j]), bool(valid[j]), str(reason[j]))


def _one_q(q: float) -> np.ndarray:
    return np.asarray([float(q)], dtype=np.float64)


def fq_mfdxa(covs, q: float) -> Cell:
    """Signed-covariance fluctuation at one (scale, q).

    With any negative covariance present, only q with q/2 a positive integer
    is defined (evaluated exactly on the signed values); other orders are
    invalid with reason ``negative_base``.
    """
    covs = np.asarray(covs, dtype=np.float64)
    qs = _one_q(q)
    if (covs < 0).any():
        col = _moments.signed_even_moments(covs, qs)
    else:
        col = _moments.positive_moments(covs, qs)
    return _cell_from_column(col, qs, q)


def fq_abs(abs_means, q: float) -> Cell:
    """Fluctuation over per-segment mean absolute residual products."""
    qs = _one_q(q)
    col = _moments.positive_moments(np.asarray(abs_means, dtype=np.float64), qs)
    return _cell_from_column(col, qs, q)


def fq_mfcca(covs, q: float) -> Cell:
    """Sign-carrying fluctuation; negative aggregates reported but invalid."""
    covs = np.asarray(covs, dtype=np.float64)
    qs = _one_q(q)
    if (covs < 0).any():
        col = _moments.signed_moments(covs, qs)
    else:
        col = _moments.positive_moments(covs, qs)
    return _cell_from_column(col, qs, q)


def fq_ps_ms(covs, q: float) -> tuple[Cell, Cell, int, int]:
    """Segment-sign split: (plus cell, minus cell, N_n+, N_n-).

    Zero covariances join the plus group, keeping the split a partition.
    """
    covs = np.asarray(covs, dtype=np.float64)
    qs = _one_q(q)
    plus = covs >= 0
    n_plus = int(plus.sum())
    n_minus = len(covs) - n_plus
    cell_p = _cell_from_column(_moments.positive_moments(covs[plus], qs), qs, q)
    cell_m = _cell_from_column(_moments.positive_moments(-covs[~plus], qs), qs, q)
    return cell_p, cell_m, n_plus, n_minus


def _group_bases(counts: np.ndarray, sums: np.ndarray, negate: bool) -> np.ndarray:
    present = counts > 0
    bases = sums[present] / counts[present]
    return -bases if negate else bases


def fq_pb_mb(stats: Sequence[SignedCovStats], q: float) -> tuple[Cell, Cell]:
    """Within-segment product-sign split at one (scale, q).

    Each segment contributes sum_plus/n_plus to the plus side and
    -sum_minus/n_minus to the minus side; segments with an empty side are
    excluded from that side's average.
    """
    n_plus = np.asarray([s.n_plus for s in stats], dtype=np.int64)
    n_minus = np.asarray([s.n_minus for s in stats], dtype=np.int64)
    sum_plus = np.asarray([s.sum_plus for s in stats], dtype=np.float64)
    sum_minus = np.asarray([s.sum_minus for s in stats], dtype=np.float64)
    qs = _one_q(q)
    cell_p = _cell_from_column(
        _moments.positive_moments(_group_bases(n_plus, sum_plus, False), qs), qs, q)
    cell_m = _cell_from_column(
        _moments.positive_moments(_group_bases(n_minus, sum_minus, True), qs), qs, q)
    return cell_p, cell_m


def fq_quadrants(stats: Sequence[SignedCovStats], q: float) -> dict[str, tuple[Cell, int]]:
    """Quadrant split at one (scale, q): {label: (cell, captured points)}."""
    qs = _one_q(q)
    out: dict[str, tuple[Cell, int]] = {}
    for label, count_attr, sum_attr, negate in (
        ("PP", "n_pp", "s_pp", False),
        ("PM", "n_pm", "s_pm", True),
        ("MP", "n_mp", "s_mp", True),
        ("MM", "n_mm", "s_mm", False),
    ):
        counts = np.asarray([getattr(s, count_attr) for s in stats], dtype=np.int64)
        sums = np.asarray([getattr(s, sum_attr) for s in stats], dtype=np.float64)
        cell = _cell_from_column(
            _moments.positive_moments(_group_bases(counts, sums, negate), qs), qs, q)
        out[label] = (cell, int(counts.sum()))
    return out


_QUADRANTS = {
    Algorithm.PP: ("n_pp", "s_pp", False),
    Algorithm.PM: ("n_pm", "s_pm", True),
    Algorithm.MP: ("n_mp", "s_mp", True),
    Algorithm.MM: ("n_mm", "s_mm", False),
}


def run_all(x, y, scales: ScaleGrid | None = None, qs: QGrid | None = None,
            config: DetrendConfig = DetrendConfig(),
            algorithms: Iterable[Algorithm | str] | None = None) -> XcorrResult:
    """Run the requested cross-correlation algorithms over a series pair.

    All algorithms consume one shared pass of per-segment statistics per
    scale, so adding algorithms is nearly free.  An algorithm whose every
    (scale, q) cell is invalid still yields a result: its fit is undefined
    and its spectrum is None, never an exception.
    """
    sx = as_series(x, "x")
    sy = as_series(y, "y")
    if len(sx) != len(sy):
        raise ValueError(f"series lengths differ: {len(sx)} vs {len(sy)}")
    n_samples = len(sx)
    if scales is None:
        scales = make_scale_grid(n_samples)
    if qs is None:
        qs = default_q_grid()
    if config.poly_order + 1 >= scales.min_scale:
        raise ValueError(
            f"poly_order {config.poly_order} needs segments longer than "
            f"{config.poly_order + 1}; min scale is {scales.min_scale}"
        )
    if algorithms is None:
        requested = tuple(Algorithm)
    else:
        requested = tuple(sorted({Algorithm(a) for a in algorithms},
                                 key=tuple(Algorithm).index))
    px = build_profile(sx).values
    py = build_profile(sy).values

    n_s, n_q = scales.count, len(qs)
    q_values = qs.q_values
    columns = {a: (np.full((n_s, n_q), np.nan), np.zeros((n_s, n_q), dtype=bool),
                   np.full((n_s, n_q), "", dtype=object), np.zeros((n_s, n_q), dtype=np.int64))
               for a in requested}
    captured = {a: 0 for a in requested}
    total_pairs = 0

    for i, scale_ in enumerate(scales.scales):
        scale = int(scale_)
        st = kernels.pair_segment_stats(px, py, scale, config.poly_order)
        total_pairs += scale * st.count
        covs = st.cov
        has_negative = bool((covs < 0).any())
        shared_positive = None
        if not has_negative and {Algorithm.MFDXA, Algorithm.MFCCA, Algorithm.PS} & set(requested):
            shared_positive = _moments.positive_moments(covs, q_values)

        for a in requested:
            if a is Algorithm.MFDXA:
                col = shared_positive if not has_negative else \
                    _moments.signed_even_moments(covs, q_values)
                captured[a] += scale * st.count
            elif a is Algorithm.ABS:
                col = _moments.positive_moments(st.abs_mean, q_values)
                captured[a] += scale * st.count
            elif a is Algorithm.MFCCA:
                col = shared_positive if not has_negative else \
                    _moments.signed_moments(covs, q_values)
                captured[a] += scale * st.count
            elif a is Algorithm.PS:
                if not has_negative:
                    col = shared_positive
                    captured[a] += scale * st.count
                else:
                    plus = covs >= 0
                    col = _moments.positive_moments(covs[plus], q_values)
                    captured[a] += scale * int(plus.sum())
            elif a is Algorithm.MS:
                minus = covs < 0
                col = _moments.positive_moments(-covs[minus], q_values)
                captured[a] += scale * int(minus.sum())
            elif a is Algorithm.PB:
                col = _moments.positive_moments(
                    _group_bases(st.n_plus, st.sum_plus, False), q_values)
                captured[a] += int(st.n_plus.sum())
            elif a is Algorithm.MB:
                col = _moments.positive_moments(
                    _group_bases(st.n_minus, st.sum_minus, True), q_values)
                captured[a] += int(st.n_minus.sum())
            else:
                count_attr, sum_attr, negate = _QUADRANTS[a]
                counts = getattr(st, count_attr)
                col = _moments.positive_moments(
                    _group_bases(counts, getattr(st, sum_attr), negate), q_values)
                captured[a] += int(counts.sum())
            values, valid, reason, excluded = columns[a]
            values[i], valid[i], reason[i], excluded[i] = col

    results: dict[Algorithm, AlgorithmResult] = {}
    for a in requested:
        values, valid, reason, excluded = columns[a]
        table = FluctuationTable(a.value, scales.scales, q_values,
                                 values, valid, reason, excluded)
        fit = fit_scaling(table)
        results[a] = AlgorithmResult(
            algorithm=a,
            table=table,
            fit=fit,
            spectrum=try_spectrum(fit),
            coverage=PairCoverage(captured=captured[a], total=total_pairs),
        )
    return XcorrResult(results=results, algorithms=requested, scales=scales, qs=qs,
                       config=config, x_label=sx.label, y_label=sy.label)
