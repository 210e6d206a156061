"""Per-scale moment evaluators shared by the fluctuation estimators.

Each evaluator maps an array of per-segment base values at one scale to a
column of F_q over the whole q grid, together with validity flags,
machine-readable reason codes for invalid cells, and counts of segments
excluded from the average.

Positive-base moments are computed in the log domain (shifted log-sum-exp),
which keeps q = +-10 on wildly scaled bases inside float64 range.  The signed
variants follow the conventions below for bases that can be negative:

* even-power route: with negative bases present, (base)^(q/2) is evaluated
  exactly only when q/2 is a positive integer; anything else is flagged
  ``negative_base``.
* sign-carrying route: sgn(base) |base|^(q/2) is summed and the signed root
  reported; a non-positive aggregate cannot enter a log-log regression and is
  flagged, but a negative value is still reported.

Zero bases would make q <= 0 moments infinite, so they are excluded from
those averages and counted; for q > 0 they contribute an exact zero and stay
in the denominator.
"""

from __future__ import annotations

import numpy as np

REASON_EMPTY = "empty_group"
REASON_ZERO = "zero_fluctuation"
REASON_NEG_BASE = "negative_base"
REASON_ZERO_SUM = "zero_signed_sum"
REASON_NEG_SUM = "negative_signed_sum"
REASON_NON_FINITE = "non_finite"


def _blank(n_q: int):
    values = np.full(n_q, np.nan)
    valid = np.zeros(n_q, dtype=bool)
    reason = np.full(n_q, "", dtype=object)
    excluded = np.zeros(n_q, dtype=np.int64)
    return values, valid, reason, excluded


def positive_moments(bases: np.ndarray, qs: np.ndarray):
    """Generalized q-mean column for non-negative per-segment bases.

    F_q = {mean(base^(q/2))}^(1/q) with the logarithmic-average limit at
    q = 0: exp{ mean(ln base) / 2 }.
    """
    values, valid, reason, excluded = _blank(len(qs))
    total = len(bases)
    if total == 0:
        reason[:] = REASON_EMPTY
        return values, valid, reason, excluded
    pos = bases[bases > 0]
    n_pos = len(pos)
    n_zero = total - n_pos
    if n_pos == 0:
        values[qs > 0] = 0.0
        reason[:] = REASON_ZERO
        return values, valid, reason, excluded
    log_b = np.log(pos)
    mean_log = log_b.mean()
    for j, q in enumerate(qs):
        if q == 0.0:
            v = np.exp(0.5 * mean_log)
            excluded[j] = n_zero
        else:
            s = 0.5 * q * log_b
            m = s.max()
            denom = total if q > 0 else n_pos
            if q < 0:
                excluded[j] = n_zero
            v = np.exp((m + np.log(np.exp(s - m).sum()) - np.log(denom)) / q)
        if np.isfinite(v) and v > 0:
            values[j] = v
            valid[j] = True
        else:
            values[j] = v if np.isfinite(v) else np.nan
            reason[j] = REASON_ZERO if v == 0 else REASON_NON_FINITE
    return values, valid, reason, excluded


def signed_even_moments(covs: np.ndarray, qs: np.ndarray):
    """Covariance q-mean column when negative bases are present.

    Only q with q/2 a positive integer evaluates the signed power exactly;
    every other order is invalid with reason ``negative_base``.  An exact
    evaluation whose aggregate is not positive cannot be rooted and is
    flagged instead.
    """
    values, valid, reason, excluded = _blank(len(qs))
    total = len(covs)
    if total == 0:
        reason[:] = REASON_EMPTY
        return values, valid, reason, excluded
    for j, q in enumerate(qs):
        half = 0.5 * q
        if q <= 0 or half != round(half):
            reason[j] = REASON_NEG_BASE
            continue
        s = float(np.mean(covs ** int(round(half))))
        if not np.isfinite(s):
            reason[j] = REASON_NON_FINITE
        elif s > 0:
            values[j] = s ** (1.0 / q)
            valid[j] = True
        elif s == 0:
            reason[j] = REASON_ZERO_SUM
        else:
            reason[j] = REASON_NEG_SUM
    return values, valid, reason, excluded


def signed_moments(covs: np.ndarray, qs: np.ndarray):
    """Sign-carrying q-mean column when negative bases are present.

    S = mean(sgn(base) |base|^(q/2)); F_q = sgn(S) |S|^(1/q).  Negative F_q
    is reported but flagged invalid for regression; S = 0 has no root and is
    flagged without a value.  q = 0 is invalid whenever negative bases exist
    (the logarithmic average is undefined).
    """
    values, valid, reason, excluded = _blank(len(qs))
    total = len(covs)
    if total == 0:
        reason[:] = REASON_EMPTY
        return values, valid, reason, excluded
    nonzero = covs[covs != 0]
    n_zero = total - len(nonzero)
    signs = np.sign(nonzero)
    log_abs = np.log(np.abs(nonzero))
    for j, q in enumerate(qs):
        if q == 0.0:
            reason[j] = REASON_NEG_BASE
            continue
        terms = signs * np.exp(0.5 * q * log_abs)
        denom = total if q > 0 else len(nonzero)
        if q < 0:
            excluded[j] = n_zero
        s = float(terms.sum() / denom)
        if not np.isfinite(s):
            reason[j] = REASON_NON_FINITE
            continue
        if s == 0:
            reason[j] = REASON_ZERO_SUM
            continue
        value = float(np.sign(s) * np.abs(s) ** (1.0 / q))
        values[j] = value
        if s > 0 and np.isfinite(value):
            valid[j] = True
        else:
            reason[j] = REASON_NEG_SUM if s < 0 else REASON_NON_FINITE
    return values, valid, reason, excluded
