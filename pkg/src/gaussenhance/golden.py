"""Floating-point reference model of the enhancement chain.

The chain per color channel is: 5x5 Gaussian smoothing, log2 dynamic range
compression (scaled by a fixed gain), then an affine gain/offset step that
remaps the frame's log-domain extrema onto the full 8-bit display range.

Everything here runs in exact integer / float64 arithmetic and serves as the
golden reference against which the streaming fixed-point model in
:mod:`gaussenhance.hwmodel` is validated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BORDER_POLICIES = ("replicate", "reflect", "zero")

#: Smallest log-domain spread still treated as a real range; anything below
#: bypasses normalization so constant frames stay constant.
DEGENERATE_RANGE = 1e-9


def pad_edges(data: np.ndarray, radius: int, border: str) -> np.ndarray:
    """Pad a 2D array by `radius` on every side under the given policy.

    replicate clamps to the nearest edge pixel, reflect mirrors with the edge
    pixel included, zero pads with 0.  The same policy semantics are shared by
    the hardware model's border injector, so the two models always agree on
    window contents.
    """
    if border == "replicate":
        return np.pad(data, radius, mode="edge")
    if border == "reflect":
        return np.pad(data, radius, mode="symmetric")
    if border == "zero":
        return np.pad(data, radius, mode="constant", constant_values=0)
    raise ValueError(f"unknown border policy {border!r}; expected one of {BORDER_POLICIES}")


def round_half_up(values: np.ndarray) -> np.ndarray:
    """Round to nearest integer with halves going up (0.5 -> 1).

    Both models quantize with this rule so they can be compared bit for bit.
    """
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


@dataclass(frozen=True)
class Plane:
    """One 8-bit image channel: `data` is row-major with shape (height, width)."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"plane dimensions must be >= 1, got {self.width}x{self.height}")
        if self.data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {self.data.shape} does not match {self.height}x{self.width}"
            )
        if self.data.dtype != np.uint8:
            raise ValueError(f"plane data must be uint8, got {self.data.dtype}")
        self.data.setflags(write=False)

    @classmethod
    def from_array(cls, arr) -> "Plane":
        """Build a Plane from any integer array after range-checking [0, 255]."""
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError(f"expected a 2D array, got shape {a.shape}")
        if a.size and (a.min() < 0 or a.max() > 255):
            raise ValueError(f"pixel values outside [0, 255]: min={a.min()} max={a.max()}")
        h, w = a.shape
        return cls(width=w, height=h, data=a.astype(np.uint8))

    @classmethod
    def constant(cls, width: int, height: int, value: int) -> "Plane":
        return cls.from_array(np.full((height, width), value, dtype=np.uint8))


@dataclass(frozen=True)
class RealPlane:
    """Intermediate real-valued channel (float64, all samples finite)."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {self.data.shape} does not match {self.height}x{self.width}"
            )
        if not np.isfinite(self.data).all():
            raise ValueError("real plane contains non-finite samples")
        self.data.setflags(write=False)

    @classmethod
    def from_array(cls, arr) -> "RealPlane":
        a = np.asarray(arr, dtype=np.float64)
        h, w = a.shape
        return cls(width=w, height=h, data=a)


@dataclass(frozen=True)
class RgbImage:
    """Three aligned 8-bit planes."""

    r: Plane
    g: Plane
    b: Plane

    def __post_init__(self):
        dims = {(p.width, p.height) for p in (self.r, self.g, self.b)}
        if len(dims) != 1:
            raise ValueError(f"channel dimensions differ: {sorted(dims)}")

    @property
    def width(self) -> int:
        return self.r.width

    @property
    def height(self) -> int:
        return self.r.height

    def planes(self) -> tuple[Plane, Plane, Plane]:
        return (self.r, self.g, self.b)

    @classmethod
    def from_array(cls, arr) -> "RgbImage":
        """Build from an (height, width, 3) array."""
        a = np.asarray(arr)
        if a.ndim != 3 or a.shape[2] != 3:
            raise ValueError(f"expected shape (h, w, 3), got {a.shape}")
        return cls(*(Plane.from_array(a[:, :, c]) for c in range(3)))

    def to_array(self) -> np.ndarray:
        return np.stack([p.data for p in self.planes()], axis=2)


@dataclass(frozen=True)
class Kernel5:
    """5x5 integer smoothing mask normalized by `denom` (= sum of weights)."""

    weights: np.ndarray
    denom: int

    def __post_init__(self):
        w = self.weights
        if w.shape != (5, 5):
            raise ValueError(f"kernel must be 5x5, got {w.shape}")
        if (w < 0).any():
            raise ValueError("kernel weights must be non-negative")
        if int(w.sum()) != self.denom or self.denom <= 0:
            raise ValueError(f"kernel weights sum to {int(w.sum())}, denom is {self.denom}")
        if not (
            np.array_equal(w, np.fliplr(w))
            and np.array_equal(w, np.flipud(w))
            and np.array_equal(w, w.T)
        ):
            raise ValueError("kernel must be symmetric under reflection and transpose")
        self.weights.setflags(write=False)


@dataclass(frozen=True)
class EnhanceParams:
    """Tuning knobs for the chain.

    k is the log gain, scale the post-log multiplier; with the defaults the
    log stage computes 48*log2(1+v), which spans [0, 384] for 8-bit input.
    The log output is deliberately left unclamped: the gain/offset stage
    renormalizes it, and clamping at 255 would crush every input above ~38.
    """

    k: float = 1.5
    scale: float = 32.0
    d_max: int = 255
    border: str = "replicate"

    def __post_init__(self):
        if self.k <= 0 or self.scale <= 0:
            raise ValueError(f"k and scale must be positive, got k={self.k} scale={self.scale}")
        if not 1 <= self.d_max <= 255:
            raise ValueError(f"d_max must be in [1, 255] for 8-bit output, got {self.d_max}")
        if self.border not in BORDER_POLICIES:
            raise ValueError(f"unknown border policy {self.border!r}")


_KERNEL_5X5 = np.array(
    [
        [1, 4, 7, 4, 1],
        [4, 16, 26, 16, 4],
        [7, 26, 41, 26, 7],
        [4, 16, 26, 16, 4],
        [1, 4, 7, 4, 1],
    ],
    dtype=np.int64,
)


def gaussian_kernel_5x5() -> Kernel5:
    """The fixed 5x5 integer Gaussian mask with normalization 1/273."""
    return Kernel5(weights=_KERNEL_5X5.copy(), denom=273)


def gaussian_kernel_continuous(sigma: float, size: int) -> np.ndarray:
    """Sample the 2D Gaussian g(x,y) = exp(-(x^2+y^2)/(2 sigma^2)) / (2 pi sigma^2)
    on an integer grid centered at the origin, normalized to sum 1.

    Provided for validation and documentation; the processing chain always
    uses the fixed integer mask from :func:`gaussian_kernel_5x5`.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if size < 3 or size % 2 == 0:
        raise ValueError(f"size must be an odd integer >= 3, got {size}")
    half = size // 2
    coords = np.arange(-half, half + 1, dtype=np.float64)
    xx, yy = np.meshgrid(coords, coords)
    g = np.exp(-(xx**2 + yy**2) / (2.0 * sigma**2)) / (2.0 * math.pi * sigma**2)
    return g / g.sum()


def convolve_5x5(plane: Plane, kernel: Kernel5 | None = None, border: str = "replicate") -> RealPlane:
    """Smooth a plane with the 5x5 mask; output keeps the input dimensions.

    The weighted sum is accumulated in exact int64 and divided by the kernel
    denominator once, so results are bit-reproducible against a direct
    per-pixel evaluation.
    """
    if kernel is None:
        kernel = gaussian_kernel_5x5()
    padded = pad_edges(plane.data.astype(np.int64), 2, border)
    windows = np.lib.stride_tricks.sliding_window_view(padded, (5, 5))
    acc = np.einsum("ijkl,kl->ij", windows, kernel.weights, dtype=np.int64)
    return RealPlane.from_array(acc / float(kernel.denom))


def log_transform(plane: RealPlane, params: EnhanceParams | None = None) -> RealPlane:
    """Apply v -> scale * k * log2(1 + v); input must be non-negative."""
    if params is None:
        params = EnhanceParams()
    if (plane.data < 0).any():
        raise ValueError("log transform input must be non-negative")
    return RealPlane.from_array(params.scale * params.k * np.log2(1.0 + plane.data))


def gain_offset(plane: RealPlane, d_max: int = 255) -> Plane:
    """Affinely remap [min, max] of the plane onto [0, d_max] and quantize.

    Quantization is round-half-up.  A degenerate range (max - min below
    DEGENERATE_RANGE) bypasses normalization and just rounds + clamps, so
    constant inputs come through as constants.
    """
    lo = float(plane.data.min())
    hi = float(plane.data.max())
    if hi - lo < DEGENERATE_RANGE:
        out = round_half_up(plane.data)
    else:
        out = round_half_up(d_max * (plane.data - lo) / (hi - lo))
    return Plane.from_array(np.clip(out, 0, d_max).astype(np.uint8))


def enhance_channel(plane: Plane, params: EnhanceParams | None = None) -> Plane:
    """Run one channel through smooth -> log -> gain/offset."""
    if params is None:
        params = EnhanceParams()
    smoothed = convolve_5x5(plane, border=params.border)
    compressed = log_transform(smoothed, params)
    return gain_offset(compressed, params.d_max)


def enhance_rgb(image: RgbImage, params: EnhanceParams | None = None) -> RgbImage:
    """Enhance each channel independently; channels never mix."""
    if params is None:
        params = EnhanceParams()
    r, g, b = (enhance_channel(p, params) for p in image.planes())
    return RgbImage(r=r, g=g, b=b)
