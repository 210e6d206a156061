"""Backend selection for the per-segment statistics kernel.

The compiled extension is preferred when importable; the NumPy reference
implementation is the fallback.  Setting the environment variable
``MFDCCA_NO_EXTENSION=1`` before import forces the fallback (used by the
benchmark and tests to compare backends).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .. import detrend
from . import _reference

__all__ = ["PairStats", "pair_segment_stats", "backend_name", "BACKEND"]

if os.environ.get("MFDCCA_NO_EXTENSION"):
    _impl = _reference
    BACKEND = "numpy"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _reference
        BACKEND = "numpy"


@dataclass(frozen=True)
class PairStats:
    """Per-segment arrays for one (profile pair, scale): the single shared
    pass every estimator derives its bases from."""

    scale: int
    cov: np.ndarray
    sum_plus: np.ndarray
    sum_minus: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray
    n_pp: np.ndarray
    n_pm: np.ndarray
    n_mp: np.ndarray
    n_mm: np.ndarray
    s_pp: np.ndarray
    s_pm: np.ndarray
    s_mp: np.ndarray
    s_mm: np.ndarray

    @property
    def count(self) -> int:
        return len(self.cov)

    @property
    def abs_mean(self) -> np.ndarray:
        """Per-segment mean absolute residual product."""
        return (self.sum_plus - self.sum_minus) / self.scale


def backend_name() -> str:
    return BACKEND


def pair_segment_stats(profile_x: np.ndarray, profile_y: np.ndarray, scale: int,
                       poly_order: int) -> PairStats:
    """Residual-product statistics for all full segments at one scale.

    Residuals are always computed by the shared NumPy detrending path so the
    two backends see bit-identical inputs; only the accumulation differs.
    """
    config = detrend.DetrendConfig(poly_order=poly_order)
    res_x = detrend.residual_matrix(profile_x, scale, config)
    if profile_y is profile_x:
        res_y = res_x
    else:
        res_y = detrend.residual_matrix(profile_y, scale, config)
    out = _impl.accumulate(res_x, res_y)
    return PairStats(scale, *out)
