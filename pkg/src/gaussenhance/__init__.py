"""Gaussian-smoothing / log2 dynamic-range-compression color image enhancer.

Two interchangeable implementations of the same chain: a float64 golden
reference (:mod:`gaussenhance.golden`) and a streaming fixed-point hardware
model with cycle accounting (:mod:`gaussenhance.hwmodel`), plus PPM I/O,
quality metrics, a benchmark harness and a CLI.
"""

from .golden import (
    BORDER_POLICIES,
    EnhanceParams,
    Kernel5,
    Plane,
    RealPlane,
    RgbImage,
    convolve_5x5,
    enhance_channel,
    enhance_rgb,
    gain_offset,
    gaussian_kernel_5x5,
    gaussian_kernel_continuous,
    log_transform,
)
from .hwmodel import (
    CycleReport,
    FrameStats,
    PipelineConfig,
    PipelineResult,
    PixelEvent,
    SerpentineBuffer,
    WindowEvent,
    fps_model,
    pipeline_run,
    run_video,
    window_stream,
)
from .metrics import DiffStats, diff_stats, psnr
from .pnm import PpmError, PpmHeader, merge_channels, read_ppm, split_channels, write_ppm

__version__ = "0.1.0"

__all__ = [
    "BORDER_POLICIES",
    "CycleReport",
    "DiffStats",
    "EnhanceParams",
    "FrameStats",
    "Kernel5",
    "PipelineConfig",
    "PipelineResult",
    "PixelEvent",
    "Plane",
    "PpmError",
    "PpmHeader",
    "RealPlane",
    "RgbImage",
    "SerpentineBuffer",
    "WindowEvent",
    "convolve_5x5",
    "diff_stats",
    "enhance_channel",
    "enhance_rgb",
    "fps_model",
    "gain_offset",
    "gaussian_kernel_5x5",
    "gaussian_kernel_continuous",
    "log_transform",
    "merge_channels",
    "pipeline_run",
    "psnr",
    "read_ppm",
    "run_video",
    "split_channels",
    "window_stream",
    "write_ppm",
]
