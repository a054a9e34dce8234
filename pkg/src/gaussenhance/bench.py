"""Throughput measurement for both models, plus clock-based frame-rate projection.

Wall-clock numbers are informative only; the hardware model's cycle counts
are deterministic and platform-independent, and those are what the projection
arithmetic builds on.
"""

from __future__ import annotations

import statistics
import time
from typing import NamedTuple

import numpy as np

from . import golden, hwmodel

CSV_HEADER = "impl,width,height,mpix_per_s,cycles,latency"

# Design point used for frame-rate projections: UXGA frames at the reference
# hardware design's rated clock, with its quoted pipeline warm-up.
PROJECTION_WIDTH = 1600
PROJECTION_HEIGHT = 1200
PROJECTION_CLOCK_HZ = 224.84e6
PROJECTION_LATENCY = 535


class BenchRow(NamedTuple):
    impl: str
    width: int
    height: int
    mpix_per_s: float
    cycles: int | None
    latency: int | None

    def to_csv(self) -> str:
        cyc = "" if self.cycles is None else str(self.cycles)
        lat = "" if self.latency is None else str(self.latency)
        return f"{self.impl},{self.width},{self.height},{self.mpix_per_s:.4f},{cyc},{lat}"


def _random_image(width: int, height: int, seed: int) -> golden.RgbImage:
    rng = np.random.default_rng(seed)
    return golden.RgbImage.from_array(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def projection_row(
    width: int = PROJECTION_WIDTH,
    height: int = PROJECTION_HEIGHT,
    clock_hz: float = PROJECTION_CLOCK_HZ,
    latency: int = PROJECTION_LATENCY,
) -> BenchRow:
    """Model-based throughput at a target clock rather than wall-clock speed."""
    fps = hwmodel.fps_model(width, height, clock_hz, latency)
    return BenchRow(
        impl=f"projection@{clock_hz / 1e6:.3f}MHz",
        width=width,
        height=height,
        mpix_per_s=fps * width * height / 1e6,
        cycles=width * height + latency,
        latency=latency,
    )


def run_bench(sizes, reps: int = 5, which: str = "golden", parallel: bool = False) -> list[BenchRow]:
    """Median-of-reps wall-clock throughput per frame size.

    sizes is a list of square edge lengths or (width, height) pairs, each at
    least 16 on a side; reps must be >= 3 to make the median meaningful.
    Appends the clock-based projection row after the measured rows.
    """
    if reps < 3:
        raise ValueError(f"repetitions must be >= 3, got {reps}")
    if which not in ("golden", "hw"):
        raise ValueError(f"impl must be 'golden' or 'hw', got {which!r}")
    norm_sizes = []
    for s in sizes:
        w, h = (s, s) if isinstance(s, int) else s
        if w < 16 or h < 16:
            raise ValueError(f"benchmark sizes must be at least 16x16, got {w}x{h}")
        norm_sizes.append((w, h))

    rows = []
    config = hwmodel.PipelineConfig(parallel=parallel)
    for i, (w, h) in enumerate(norm_sizes):
        image = _random_image(w, h, seed=9000 + i)
        times = []
        cycles = latency = None
        for _ in range(reps):
            t0 = time.perf_counter()
            if which == "golden":
                golden.enhance_rgb(image)
            else:
                res = hwmodel.pipeline_run(image, config)
                cycles = res.report.total_cycles
                latency = res.report.latency_cycles
            times.append(time.perf_counter() - t0)
        median = statistics.median(times)
        rows.append(BenchRow(which, w, h, w * h / 1e6 / median, cycles, latency))
    rows.append(projection_row())
    return rows


def to_csv(rows) -> str:
    return "\n".join([CSV_HEADER] + [row.to_csv() for row in rows]) + "\n"
