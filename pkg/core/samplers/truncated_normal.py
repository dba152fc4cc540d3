# Univariate truncated normal draws.
"""Inverse-CDF sampling of ``N(mean, sd^2)`` restricted to ``[lo, hi]``.

Windows lying entirely above the mean are reflected below it, where ``ndtr``
keeps full relative precision.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import ndtr, ndtri

from core.models.covariance import FloatArray
from core.models.exceptions import InvalidArgumentError
from core.samplers.rng import RngState

CDF_UNDERFLOW = 1e-300


def truncated_normal_from_uniform(
    mean: float | FloatArray,
    sd: float | FloatArray,
    lo: float | FloatArray,
    hi: float | FloatArray,
    w: float | FloatArray,
) -> float | FloatArray:
    """Map ``w`` in ``[0, 1)`` to the truncated normal quantile; no validation."""

    flip = (lo - mean) > 0
    sign = np.where(flip, -1.0, 1.0)
    lower = np.where(flip, (mean - hi) / sd, (lo - mean) / sd)
    upper = np.where(flip, (mean - lo) / sd, (hi - mean) / sd)
    cdf_lo, cdf_hi = ndtr(lower), ndtr(upper)
    width = cdf_hi - cdf_lo
    standardized = np.clip(ndtri(cdf_lo + w * width), lower, upper)
    draws = np.where(
        width < CDF_UNDERFLOW, 0.5 * (lo + hi), mean + sign * sd * standardized
    )
    draws = np.clip(draws, lo, hi)
    return float(draws) if np.ndim(draws) == 0 else draws


def truncated_normal_sample(
    mean: float | ArrayLike,
    sd: float | ArrayLike,
    lo: float | ArrayLike,
    hi: float | ArrayLike,
    rng: RngState,
) -> float | FloatArray:
    """Draw one truncated normal per broadcast element of the arguments.

    Returns the mean clipped to ``[lo, hi]`` when ``rng`` carries zero noise,
    and the interval midpoint when the CDF window is narrower than
    ``CDF_UNDERFLOW``.

    Raises
    ------
    InvalidArgumentError
        Unless ``lo < hi`` and ``sd > 0`` elementwise.

    Examples
    --------
    >>> draw = truncated_normal_sample(5.0, 2.0, 4.0, 6.0, RngState.from_seed(3))
    >>> 4.0 <= draw <= 6.0
    True
    """

    m, s, a, b = np.broadcast_arrays(
        *(np.asarray(value, dtype=np.float64) for value in (mean, sd, lo, hi))
    )
    if np.any(a >= b):
        raise InvalidArgumentError("truncation interval needs lo < hi")
    if np.any(s <= 0):
        raise InvalidArgumentError("standard deviation must be positive")

    if rng.noise_scale == 0.0:
        clipped = np.clip(m, a, b)
        return float(clipped) if clipped.ndim == 0 else clipped

    w = rng.uniform(0.0, 1.0, size=m.shape if m.ndim else None)
    return truncated_normal_from_uniform(m, s, a, b, w)
