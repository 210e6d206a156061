import numpy as np
import pytest

from mfdcca import CascadeSpec, build_profile, generate


@pytest.fixture(scope="session")
def cascade12_pair():
    """Small deterministic cascade pair for fast structural tests."""
    x = generate(CascadeSpec(stages=12, p=0.3))
    y = generate(CascadeSpec(stages=12, p=0.4))
    return x, y


@pytest.fixture(scope="session")
def profile12_pair(cascade12_pair):
    x, y = cascade12_pair
    return build_profile(x), build_profile(y)


def brute_force_fit(segment: np.ndarray, order: int) -> np.ndarray:
    """Independent trend oracle: raw-abscissa polyfit, explicit polyval."""
    k = np.arange(1, len(segment) + 1, dtype=float)
    coef = np.polyfit(k, segment, order)
    return np.polyval(coef, k)


def brute_force_variance(profile: np.ndarray, scale: int, nu: int, order: int) -> float:
    """Detrended variance with explicit loops; nu starts at 1."""
    seg = profile[(nu - 1) * scale: nu * scale]
    fit = brute_force_fit(seg, order)
    acc = 0.0
    for k in range(scale):
        acc += (seg[k] - fit[k]) ** 2
    return acc / scale


def brute_force_covariance(px: np.ndarray, py: np.ndarray, scale: int, nu: int,
                           order: int) -> float:
    seg_x = px[(nu - 1) * scale: nu * scale]
    seg_y = py[(nu - 1) * scale: nu * scale]
    fx = brute_force_fit(seg_x, order)
    fy = brute_force_fit(seg_y, order)
    acc = 0.0
    for k in range(scale):
        acc += (seg_x[k] - fx[k]) * (seg_y[k] - fy[k])
    return acc / scale
