"""Figure rendering for benchmark and comparison reports.

Every CSV the CLI emits can be paired with a rendered figure; plots are
written straight to files (Agg backend), never shown interactively.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .golden import RgbImage
from .metrics import diff_stats, psnr


def save_bench_figure(rows, path) -> None:
    """Two-panel throughput report: MPix/s per size, and hw cycle counts."""
    measured = [r for r in rows if not r.impl.startswith("projection")]
    projections = [r for r in rows if r.impl.startswith("projection")]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    impls = sorted({r.impl for r in measured})
    for impl in impls:
        pts = sorted((r.width * r.height, r.mpix_per_s) for r in measured if r.impl == impl)
        ax1.plot([p for p, _ in pts], [m for _, m in pts], marker="o", label=impl)
    ax1.set_xscale("log")
    ax1.set_xlabel("pixels per frame")
    ax1.set_ylabel("MPix/s (wall clock)")
    ax1.set_title("measured throughput")
    if impls:
        ax1.legend()
    ax1.grid(True, alpha=0.3)

    cyc = sorted(
        (r.width * r.height, r.cycles, r.latency) for r in measured if r.cycles is not None
    )
    if cyc:
        ax2.plot([p for p, _, _ in cyc], [c for _, c, _ in cyc], marker="s", label="total cycles")
        ax2.plot(
            [p for p, _, _ in cyc], [l for _, _, l in cyc], marker="^", label="latency cycles"
        )
        ax2.set_xscale("log")
        ax2.set_yscale("log")
        ax2.legend()
    for r in projections:
        fps = r.mpix_per_s * 1e6 / (r.width * r.height)
        ax2.set_title(f"cycle model ({r.impl}: {fps:.1f} fps at {r.width}x{r.height})")
    if not projections:
        ax2.set_title("cycle model")
    ax2.set_xlabel("pixels per frame")
    ax2.set_ylabel("cycles")
    ax2.grid(True, alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_compare_figure(a: RgbImage, b: RgbImage, path, labels=("a", "b")) -> None:
    """Side-by-side images plus an absolute-difference heat map."""
    d = np.abs(a.to_array().astype(np.int16) - b.to_array().astype(np.int16)).max(axis=2)
    stats = diff_stats(a, b)
    value = psnr(a, b)

    fig, axes = plt.subplots(1, 3, figsize=(12, 4.2))
    axes[0].imshow(a.to_array())
    axes[0].set_title(labels[0])
    axes[1].imshow(b.to_array())
    axes[1].set_title(labels[1])
    im = axes[2].imshow(d, cmap="magma", vmin=0, vmax=max(1, stats.max_abs_diff))
    axes[2].set_title(f"max |diff| per pixel (max={stats.max_abs_diff})")
    fig.colorbar(im, ax=axes[2], fraction=0.046)
    for ax in axes:
        ax.set_xticks([])
        ax.set_yticks([])
    fig.suptitle(f"PSNR = {'inf' if value == float('inf') else f'{value:.2f}'} dB")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
