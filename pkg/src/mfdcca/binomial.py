"""Deterministic binomial multiplicative cascade and its closed-form limits.

The cascade assigns 2**stages positive weights whose multifractal properties
are known exactly, which makes it the workhorse for validating every
estimator in this package: run an estimator on the generated series, compare
against :func:`analytic`.

Sign convention: ``analytic`` returns the singularity strength with the sign
chosen so that alpha > 0 (the raw base-2 derivative of the partition log-sum
is negative); f is defined as q*alpha - tau under the same convention, so the
Legendre identity holds exactly and f(q=0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import TimeSeries

__all__ = ["CascadeSpec", "AnalyticPoint", "generate", "analytic"]

MAX_STAGES = 26  # 2**26 doubles = 512 MiB; refuse anything bigger


@dataclass(frozen=True)
class CascadeSpec:
    """Number of halving stages and the left-branch weight p."""

    stages: int
    p: float

    def __post_init__(self):
        if not 1 <= self.stages <= MAX_STAGES:
            raise ValueError(f"stages must be in 1..{MAX_STAGES}, got {self.stages}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie strictly inside (0, 1), got {self.p}")
        if abs(self.p - 0.5) < 1e-12:
            raise ValueError("p = 0.5 gives a constant (monofractal) cascade; pick p != 0.5")


def generate(spec: CascadeSpec | None = None, *, stages: int | None = None,
             p: float | None = None) -> TimeSeries:
    """Generate the cascade series x_i = p**b(i-1) * (1-p)**(stages - b(i-1)).

    b() counts the ones in the binary representation of the zero-based index,
    so the output is a pure function of (stages, p); the values sum to 1.
    """
    if spec is None:
        spec = CascadeSpec(stages=int(stages), p=float(p))
    i = np.arange(2 ** spec.stages, dtype=np.uint64)
    ones = np.bitwise_count(i).astype(np.float64)
    values = spec.p ** ones * (1.0 - spec.p) ** (spec.stages - ones)
    return TimeSeries(values=values, label=f"binomial(stages={spec.stages}, p={spec.p:g})")


class AnalyticPoint(NamedTuple):
    H: np.ndarray | float
    tau: np.ndarray | float
    alpha: np.ndarray | float
    f: np.ndarray | float


def analytic(q, p: float) -> AnalyticPoint:
    """Closed-form (H, tau, alpha, f) of the infinite cascade at moment q.

    Accepts a scalar or an array of q values.  The removable q = 0
    singularities are filled with their limits: H(0) = alpha(0), tau(0) = -1,
    f(0) = 1.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    q_arr = np.asarray(q, dtype=np.float64)
    scalar = q_arr.ndim == 0
    q_arr = np.atleast_1d(q_arr)
    wp = p ** q_arr
    wm = (1.0 - p) ** q_arr
    z = wp + wm
    tau = -np.log2(z)
    alpha = -(wp * np.log2(p) + wm * np.log2(1.0 - p)) / z
    with np.errstate(divide="ignore", invalid="ignore"):
        h = (1.0 - np.log2(z)) / q_arr
    h = np.where(q_arr == 0, alpha, h)
    f = q_arr * alpha - tau
    if scalar:
        return AnalyticPoint(float(h[0]), float(tau[0]), float(alpha[0]), float(f[0]))
    return AnalyticPoint(h, tau, alpha, f)
