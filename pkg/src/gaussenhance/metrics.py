"""Image difference metrics used to validate the two models against each other."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .golden import Plane, RgbImage


class DiffStats(NamedTuple):
    max_abs_diff: int
    mean_abs_diff: float
    count_nonzero: int


def _samples(a, b) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(a, RgbImage) and isinstance(b, RgbImage):
        if (a.width, a.height) != (b.width, b.height):
            raise ValueError(f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")
        return a.to_array(), b.to_array()
    if isinstance(a, Plane) and isinstance(b, Plane):
        if (a.width, a.height) != (b.width, b.height):
            raise ValueError(f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")
        return a.data, b.data
    raise TypeError("operands must both be Plane or both RgbImage")


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB, 8-bit peak, channels pooled.

    Identical inputs have zero MSE; that is reported as math.inf.
    """
    xa, xb = _samples(a, b)
    mse = float(np.mean((xa.astype(np.float64) - xb.astype(np.float64)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def diff_stats(a, b) -> DiffStats:
    """Elementwise absolute-difference summary (max, mean, nonzero count)."""
    xa, xb = _samples(a, b)
    d = np.abs(xa.astype(np.int64) - xb.astype(np.int64))
    return DiffStats(
        max_abs_diff=int(d.max()),
        mean_abs_diff=float(d.mean()),
        count_nonzero=int(np.count_nonzero(d)),
    )
