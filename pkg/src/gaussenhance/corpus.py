"""Bundled test corpus: deterministic synthetic 256x256 low-light photos.

Validation needs poorly-lit scenes with smooth structure, highlights and
sensor-like texture.  Real photographs cannot ship with the package, so these
are procedurally generated from fixed seeds; every scene keeps a small black
floor (a real sensor's pedestal plus noise) and never saturates the whole
frame, which keeps the log stage away from its zero singularity.
"""

from __future__ import annotations

import numpy as np

from .golden import RgbImage

SIZE = 256


def _grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.linspace(0.0, 1.0, n)
    return np.meshgrid(c, c)


def _blob(xx, yy, cx, cy, radius, amplitude):
    return amplitude * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * radius**2))


def _waves(xx, yy, rng, n, amplitude):
    out = np.zeros_like(xx)
    for _ in range(n):
        fx, fy = rng.uniform(1.0, 6.0, size=2)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        out += np.cos(2.0 * np.pi * (fx * xx + fy * yy) + phase)
    return amplitude * out / n


def _finish(channels, rng, floor=6.0, noise=3.0) -> RgbImage:
    stack = []
    for ch in channels:
        ch = ch + floor + rng.normal(0.0, noise, size=ch.shape)
        stack.append(np.clip(ch, 2.0, 250.0))
    arr = np.stack(stack, axis=2)
    return RgbImage.from_array(np.round(arr).astype(np.uint8))


def dusk_gradient(size: int = SIZE) -> RgbImage:
    """Fading sky over a dark foreground, with a low sun glow."""
    rng = np.random.default_rng(101)
    xx, yy = _grid(size)
    sky = 90.0 * (1.0 - yy) ** 2
    glow = _blob(xx, yy, 0.7, 0.25, 0.18, 110.0)
    ground = np.where(yy > 0.62, 12.0 + _waves(xx, yy, rng, 4, 8.0), 0.0)
    r = sky * 1.0 + glow * 1.0 + ground
    g = sky * 0.8 + glow * 0.7 + ground * 0.9
    b = sky * 0.9 + glow * 0.4 + ground * 0.8
    return _finish((r, g, b), rng)


def night_street(size: int = SIZE) -> RgbImage:
    """Dark street scene: a handful of lamps with radial falloff."""
    rng = np.random.default_rng(202)
    xx, yy = _grid(size)
    base = 10.0 + _waves(xx, yy, rng, 5, 6.0)
    lamps = np.zeros_like(xx)
    for _ in range(6):
        cx, cy = rng.uniform(0.1, 0.9, size=2)
        lamps += _blob(xx, yy, cx, cy, rng.uniform(0.04, 0.1), rng.uniform(120.0, 220.0))
    r = base + lamps
    g = base + lamps * 0.85
    b = base * 1.2 + lamps * 0.6
    return _finish((r, g, b), rng)


def forest_haze(size: int = SIZE) -> RgbImage:
    """Low-contrast hazy texture with a diagonal light shaft."""
    rng = np.random.default_rng(303)
    xx, yy = _grid(size)
    haze = 35.0 + 25.0 * xx * (1.0 - yy)
    shaft = _blob(xx, yy, 0.35, 0.4, 0.3, 60.0) * (1.0 + 0.5 * np.cos(8.0 * np.pi * (xx - yy)))
    texture = _waves(xx, yy, rng, 8, 18.0)
    r = haze * 0.7 + shaft * 0.8 + texture
    g = haze + shaft + texture * 0.9
    b = haze * 0.8 + shaft * 0.5 + texture * 0.7
    return _finish((r, g, b), rng)


def synthetic_corpus(size: int = SIZE) -> dict[str, RgbImage]:
    """All corpus scenes keyed by name, regenerated deterministically."""
    return {
        "dusk_gradient": dusk_gradient(size),
        "night_street": night_street(size),
        "forest_haze": forest_haze(size),
    }
