"""Vectorized NumPy implementation of the residual-product accumulator.

This is the fallback used when the compiled extension is unavailable.  Both
backends consume identical residual matrices (computed once, upstream) and
differ only in summation order, so they agree to a few ulps on every sum and
exactly on every count.
"""

from __future__ import annotations

import numpy as np


def accumulate(res_x: np.ndarray, res_y: np.ndarray):
    """Signed/quadrant bookkeeping per segment from two residual matrices.

    Returns thirteen arrays of length N_n: cov, sum_plus, sum_minus,
    n_plus, n_minus, n_pp, n_pm, n_mp, n_mm, s_pp, s_pm, s_mp, s_mm.
    """
    scale = res_x.shape[1]
    prod = res_x * res_y

    plus = prod >= 0
    sum_plus = np.where(plus, prod, 0.0).sum(axis=1)
    sum_minus = np.where(plus, 0.0, prod).sum(axis=1)
    n_plus = plus.sum(axis=1, dtype=np.int64)
    n_minus = scale - n_plus
    cov = (sum_plus + sum_minus) / scale

    x_p = res_x <= 0
    y_p = res_y <= 0
    quads = []
    for mask in (x_p & y_p, x_p & ~y_p, ~x_p & y_p, ~x_p & ~y_p):
        quads.append(mask.sum(axis=1, dtype=np.int64))
        quads.append(np.where(mask, prod, 0.0).sum(axis=1))
    n_pp, s_pp, n_pm, s_pm, n_mp, s_mp, n_mm, s_mm = quads
    return (cov, sum_plus, sum_minus, n_plus, n_minus,
            n_pp, n_pm, n_mp, n_mm, s_pp, s_pm, s_mp, s_mm)
