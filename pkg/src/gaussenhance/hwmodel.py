"""Bit-faithful streaming model of the enhancement pipeline datapath.

Mirrors a line-buffered FPGA-style architecture: a border injector feeding a
serpentine window former (four row FIFOs threaded through a 5x5 window
register file), a constant-coefficient convolution with reciprocal-multiply
normalization, an integer+fraction log2 unit, and a gain/offset stage built
on a pipelined 8x8 multiplier.  Three identical channel pipelines run in
parallel, one pixel per clock.

All datapath arithmetic is integer and deterministic; cycle numbers attached
to events make the model's latency and throughput measurable.  Fixed-point
layouts:

    conv accumulator   17 bits   (max 255 * 273 = 69,615)
    conv reciprocal    Q0.20     round(2^20 / 273) = 3841
    log output         Q10.6     48 * log2(1 + v), max 384 -> 24,576
    gain               Q8.8      round(255 * 2^8 / log range); wider than
                                 16 bits only when the frame's log range is
                                 below one output unit
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .golden import BORDER_POLICIES, Kernel5, Plane, RgbImage, gaussian_kernel_5x5, pad_edges


@dataclass(frozen=True)
class FixedFormat:
    """Unsigned fixed-point layout: total_bits wide with frac_bits fraction."""

    total_bits: int
    frac_bits: int

    @property
    def int_bits(self) -> int:
        return self.total_bits - self.frac_bits

    @property
    def max_value(self) -> int:
        return (1 << self.total_bits) - 1

    def check(self, value: int) -> int:
        if not 0 <= value <= self.max_value:
            raise OverflowError(f"{value} does not fit {self.total_bits}-bit format")
        return value


LOG_FORMAT = FixedFormat(16, 6)
GAIN_FORMAT = FixedFormat(16, 8)

#: Reciprocal of the kernel denominator in Q0.20: round(2^20 / 273).
CONV_RECIP = 3841
CONV_RECIP_BITS = 20

#: Combined log gain baked into the constant-coefficient datapath (1.5 * 32).
LOG_GAIN = 48

#: Correction added to the raw mantissa fraction, indexed by its top 4 bits.
#: Entry j is round(256 * (log2(1 + j/16) - j/16)): the exact-log2 offset at
#: each segment start, so exact powers of two stay exact.
LOG_CORRECTION = (0, 6, 12, 15, 18, 20, 22, 22, 22, 21, 19, 17, 15, 12, 8, 4)

#: Pipeline register depth of the 8x8 multiplier.
MULT8_LATENCY = 5

# Stage register depths used for cycle accounting.  WINDOW_REG_LATENCY is the
# window register file output stage; CONV covers 25 products, a 5-level adder
# tree and the reciprocal multiply; LOG covers leading-one detect, correction
# lookup and scaling; GAIN covers subtract/clamp, the pipelined multiplier and
# final rounding.
WINDOW_REG_LATENCY = 1
CONV_LATENCY = 7
LOG_LATENCY = 3
GAIN_LATENCY = 2 + MULT8_LATENCY

STATS_MODES = ("two_pass", "previous_frame")


class PixelEvent(NamedTuple):
    cycle: int
    value: int
    valid: bool = True


class WindowEvent(NamedTuple):
    cycle: int
    window: tuple  # five rows of five pixels, window[0] is the top row
    valid: bool = True


@dataclass(frozen=True)
class FrameStats:
    """Log-domain extrema of a frame (Q10.6), plus how they were obtained."""

    log_min: int
    log_max: int
    source: str

    def __post_init__(self):
        if self.log_min > self.log_max:
            raise ValueError(f"log_min {self.log_min} exceeds log_max {self.log_max}")
        if self.source not in STATS_MODES:
            raise ValueError(f"unknown stats source {self.source!r}")


@dataclass(frozen=True)
class CycleReport:
    """Latency/throughput accounting for one channel pipeline run.

    All three channel pipelines share the same geometry, so a single report
    describes the frame.  steady_state_rate must be exactly 1.0: once the
    first enhanced pixel leaves, one follows every clock until the frame ends.
    """

    width: int
    height: int
    latency_cycles: int
    total_cycles: int
    pixels_out: int
    steady_state_rate: float

    def __post_init__(self):
        if self.steady_state_rate != 1.0:
            raise ValueError(f"steady-state rate must be 1.0, got {self.steady_state_rate}")

    def projected_fps(self, clock_hz: float, width: int | None = None, height: int | None = None) -> float:
        """Frame rate at a given clock for this (or another) frame geometry."""
        return fps_model(width or self.width, height or self.height, clock_hz, self.latency_cycles)


class SerpentineBuffer:
    """5x5 sliding-window former fed one pixel per clock.

    Four row FIFOs are threaded through the window register file: each new
    pixel enters the newest window row, the pixel shifted out of a row feeds
    the FIFO leading to the row above.  With feed width Wf the row-to-row
    delay must be exactly Wf, and since each window row contributes 5
    registers the aligning FIFO depth is Wf - 5 (the default).
    """

    def __init__(self, feed_width: int, fifo_depth: int | None = None):
        if feed_width < 5:
            raise ValueError(f"feed width must be >= 5, got {feed_width}")
        self.feed_width = feed_width
        self.fifo_depth = feed_width - 5 if fifo_depth is None else fifo_depth
        if self.fifo_depth < 0:
            raise ValueError(f"fifo depth must be >= 0, got {self.fifo_depth}")
        self.fifos = tuple(deque() for _ in range(4))
        self.rows = [[0] * 5 for _ in range(5)]  # rows[0] holds the oldest row

    def feed(self, value: int) -> None:
        """Clock one pixel in; window() then reflects the shifted state."""
        depth = self.fifo_depth
        v = value
        for r in (4, 3, 2, 1, 0):
            row = self.rows[r]
            row.append(v)
            out = row.pop(0)
            if r == 0:
                break
            fifo = self.fifos[r - 1]
            if depth == 0:
                v = out
            else:
                v = fifo.popleft() if len(fifo) == depth else 0
                fifo.append(out)

    def window(self) -> tuple:
        return tuple(tuple(row) for row in self.rows)

    def occupancy(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.fifos)


def plane_to_events(plane: Plane, start_cycle: int = 0) -> list[PixelEvent]:
    """Raster-order pixel stream for a plane, one event per cycle."""
    flat = plane.data.reshape(-1)
    return [PixelEvent(start_cycle + k, int(v), True) for k, v in enumerate(flat)]


def _injector_delay(width: int) -> int:
    # One padded row of buffering lets every border policy synthesize its top
    # padding causally; keeping it policy-independent keeps latency constant
    # for a given geometry.
    return width + 4


def window_stream(
    pixels: Iterable[PixelEvent],
    width: int,
    height: int,
    border: str = "replicate",
    fifo_depth: int | None = None,
) -> Iterator[WindowEvent]:
    """Turn a raster pixel stream into one centered 5x5 window per pixel.

    A border injector expands the frame by two pixels on every side under the
    chosen policy and feeds the padded raster through the serpentine buffer,
    so exactly width*height valid windows come out.  Cycle stamps count the
    padded feed clock; window k for image position (y, x) is produced at

        first_cycle + injector_delay + (y+4)*(width+4) + (x+4) + 1

    which leaves four idle feed cycles per row of horizontal padding; the
    pipeline's output stage absorbs those gaps (see pipeline_run).
    """
    if border not in BORDER_POLICIES:
        raise ValueError(f"unknown border policy {border!r}")
    expected = width * height
    values = []
    first_cycle = 0
    last_cycle = None
    for ev in pixels:
        if last_cycle is not None and ev.cycle <= last_cycle:
            raise ValueError(f"pixel event cycles must be strictly increasing at cycle {ev.cycle}")
        last_cycle = ev.cycle
        if not ev.valid:
            continue
        if not 0 <= ev.value <= 255:
            raise ValueError(f"pixel value {ev.value} outside [0, 255]")
        if not values:
            first_cycle = ev.cycle
        values.append(ev.value)
        if len(values) > expected:
            raise ValueError(f"stream overrun: more than {expected} valid pixels for {width}x{height}")
    if len(values) != expected:
        raise ValueError(f"stream underrun: got {len(values)} valid pixels, expected {expected}")

    data = np.array(values, dtype=np.uint8).reshape(height, width)
    padded = pad_edges(data, 2, border)
    feed_width = width + 4
    buf = SerpentineBuffer(feed_width, fifo_depth)
    base = first_cycle + _injector_delay(width) + WINDOW_REG_LATENCY

    # FIFO occupancy can never exceed the configured depth: feed() pops the
    # aligned tap before pushing the row spill.
    idx = 0
    for yp, prow in enumerate(padded.tolist()):
        for xp, value in enumerate(prow):
            buf.feed(value)
            if yp >= 4 and xp >= 4:
                yield WindowEvent(cycle=base + idx, window=buf.window(), valid=True)
            idx += 1


def _kernel_rows(kernel: Kernel5) -> tuple:
    if kernel.denom != 273:
        raise ValueError("the fixed-point convolution datapath is baked for the /273 mask")
    return tuple(tuple(int(w) for w in row) for row in kernel.weights)


def div273_fixed(acc: int) -> int:
    """Divide a convolution accumulator by 273 via reciprocal multiply.

    (acc * 3841 + 2^19) >> 20, clamped to 8 bits; stays within 1 LSB of exact
    round(acc / 273) over the whole accumulator range [0, 69615].
    """
    if not 0 <= acc <= 255 * 273:
        raise ValueError(f"accumulator {acc} outside [0, {255 * 273}]")
    return min(255, (acc * CONV_RECIP + (1 << (CONV_RECIP_BITS - 1))) >> CONV_RECIP_BITS)


def conv_fixed(window, kernel: Kernel5 | None = None) -> int:
    """8-bit smoothed pixel for one window: weighted sum, then div273_fixed."""
    rows = window.window if isinstance(window, WindowEvent) else window
    krows = _kernel_rows(kernel if kernel is not None else gaussian_kernel_5x5())
    acc = 0
    for wrow, prow in zip(krows, rows):
        for w, p in zip(wrow, prow):
            acc += w * p
    return div273_fixed(acc)


def log2_fixed(v: int) -> int:
    """Q10.6 approximation of 48 * log2(1 + v) for an 8-bit pixel.

    The leading one of u = v + 1 gives the integer part; the bits after it,
    left-aligned to 8, give the raw mantissa fraction; a 16-entry correction
    indexed by the top 4 fraction bits pulls the straight-line mantissa onto
    the log curve.  Exact at powers of two, and within 2.5 output units of
    the exact value everywhere (the raw approximation is off by up to ~4.1).
    """
    if not 0 <= v <= 255:
        raise ValueError(f"log input {v} outside [0, 255]")
    u = v + 1
    i = u.bit_length() - 1
    frac = (u - (1 << i)) << (8 - i)
    corrected = frac + LOG_CORRECTION[frac >> 4]
    return LOG_FORMAT.check(12 * ((i << 8) + corrected))


def mult8x8(n1: int, n2: int, cycle: int = 0) -> tuple[int, int]:
    """Pipelined 8x8 unsigned multiply: exact 16-bit product, 5-cycle latency.

    Returns (product, ready_cycle).
    """
    if not 0 <= n1 <= 255 or not 0 <= n2 <= 255:
        raise ValueError(f"multiplier operands must be 8-bit, got {n1}, {n2}")
    return n1 * n2, cycle + MULT8_LATENCY


def _mul_wide(a: int, b: int) -> int:
    # Wide unsigned multiply composed from parallel 8x8 partial products.
    total = 0
    ai, shift_a = a, 0
    while True:
        bi, shift_b = b, 0
        while True:
            p, _ = mult8x8(ai & 0xFF, bi & 0xFF)
            total += p << (shift_a + shift_b)
            bi >>= 8
            if bi == 0:
                break
            shift_b += 8
        ai >>= 8
        if ai == 0:
            break
        shift_a += 8
    return total


def frame_stats(log_values, mode: str = "two_pass", previous: FrameStats | None = None) -> FrameStats:
    """Log-domain extrema used by the gain/offset stage.

    two_pass buffers the frame and returns its exact extrema.  previous_frame
    models the single-pass video pipeline: the stats handed to frame n are
    frame n-1's extrema (`previous`); the first frame, with no predecessor,
    falls back to its own exact extrema.
    """
    if mode not in STATS_MODES:
        raise ValueError(f"unknown stats mode {mode!r}")
    values = list(log_values)
    if not values:
        raise ValueError("cannot compute frame stats of an empty frame")
    if mode == "previous_frame" and previous is not None:
        return FrameStats(previous.log_min, previous.log_max, "previous_frame")
    return FrameStats(min(values), max(values), "two_pass")


#: 255 in the gain stage's product scale: 255 * 2^8 expressed against Q10.6 input.
_GAIN_NUMERATOR = 255 << (GAIN_FORMAT.frac_bits + LOG_FORMAT.frac_bits)
_GAIN_SHIFT = GAIN_FORMAT.frac_bits + LOG_FORMAT.frac_bits


def gain_offset_fixed(v: int, stats: FrameStats) -> int:
    """Map a Q10.6 log sample onto [0, 255] using the frame extrema.

    gain = round(255 * 2^8 / log_range) held in Q8.8; the distance above
    log_min (clamped to the range, so stale previous-frame stats saturate
    cleanly) is scaled by it and rounded half-up.  Samples at the extrema map
    to exactly 0 and 255; a zero range bypasses normalization and just
    rounds the sample itself, keeping constant frames constant.
    """
    LOG_FORMAT.check(v)
    rng = stats.log_max - stats.log_min
    if rng == 0:
        return min(255, max(0, (v + (1 << (LOG_FORMAT.frac_bits - 1))) >> LOG_FORMAT.frac_bits))
    d = min(max(v - stats.log_min, 0), rng)
    if d == rng:
        return 255
    gain = (2 * _GAIN_NUMERATOR + rng) // (2 * rng)
    prod = _mul_wide(d, gain)
    return min(255, max(0, (prod + (1 << (_GAIN_SHIFT - 1))) >> _GAIN_SHIFT))


@dataclass(frozen=True)
class PipelineConfig:
    border: str = "replicate"
    stats_mode: str = "two_pass"
    fifo_depth: int | None = None
    parallel: bool = False

    def __post_init__(self):
        if self.border not in BORDER_POLICIES:
            raise ValueError(f"unknown border policy {self.border!r}")
        if self.stats_mode not in STATS_MODES:
            raise ValueError(f"unknown stats mode {self.stats_mode!r}")


@dataclass
class PipelineResult:
    """Enhanced image plus timing and the stats that drove the gain stage.

    frame_stats carries this frame's own log extrema per channel so video
    callers can hand them to the next frame in previous_frame mode.
    """

    image: RgbImage
    report: CycleReport
    stats_used: tuple[FrameStats, FrameStats, FrameStats]
    frame_stats: tuple[FrameStats, FrameStats, FrameStats]
    config: PipelineConfig


_STAGE_ORDER = {"input": 0, "window": 1, "conv": 2, "log": 3, "out": 4}


def _run_channel(plane: Plane, config: PipelineConfig, prev: FrameStats | None, label: str, trace_rows):
    krows = _kernel_rows(gaussian_kernel_5x5())
    events = plane_to_events(plane)
    if trace_rows is not None:
        for ev in events:
            trace_rows.append((ev.cycle, "input", label, ev.value, 1))

    log_stream = []
    for wev in window_stream(events, plane.width, plane.height, config.border, config.fifo_depth):
        acc = 0
        for wrow, prow in zip(krows, wev.window):
            acc += (
                wrow[0] * prow[0]
                + wrow[1] * prow[1]
                + wrow[2] * prow[2]
                + wrow[3] * prow[3]
                + wrow[4] * prow[4]
            )
        conv = div273_fixed(acc)
        lval = log2_fixed(conv)
        lcycle = wev.cycle + CONV_LATENCY + LOG_LATENCY
        if trace_rows is not None:
            trace_rows.append((wev.cycle, "window", label, wev.window[2][2], 1))
            trace_rows.append((wev.cycle + CONV_LATENCY, "conv", label, conv, 1))
            trace_rows.append((lcycle, "log", label, lval, 1))
        log_stream.append((lcycle, lval))

    values = [v for _, v in log_stream]
    own = frame_stats(values, "two_pass")
    if config.stats_mode == "two_pass":
        used = own
    else:
        used = frame_stats(values, "previous_frame", previous=prev)

    # The gain stage drains an elastic buffer: the first output is deferred to
    # the earliest cycle from which one pixel can leave every clock without
    # the buffer ever running dry, so the injector's per-row padding gaps
    # never reach the output.
    first_out = max(c - k for k, (c, _) in enumerate(log_stream)) + GAIN_LATENCY
    out = np.empty(len(log_stream), dtype=np.uint8)
    for k, (_, v) in enumerate(log_stream):
        res = gain_offset_fixed(v, used)
        out[k] = res
        if trace_rows is not None:
            trace_rows.append((first_out + k, "out", label, res, 1))

    out_plane = Plane(plane.width, plane.height, out.reshape(plane.height, plane.width))
    return out_plane, first_out, first_out + len(log_stream), own, used


def pipeline_run(
    image: RgbImage,
    config: PipelineConfig | None = None,
    prev_stats: tuple[FrameStats, FrameStats, FrameStats] | None = None,
    trace: list | None = None,
) -> PipelineResult:
    """Run the three channel pipelines over one frame.

    prev_stats supplies the previous frame's per-channel extrema for
    previous_frame stats mode.  When `trace` is a list it receives
    (cycle, stage, channel, value, valid) tuples for every event, sorted by
    cycle; channels are independent state machines and may run on threads
    (config.parallel) without changing any output.
    """
    if config is None:
        config = PipelineConfig()
    planes = image.planes()
    prev = prev_stats if prev_stats is not None else (None, None, None)
    labels = ("r", "g", "b")
    traces = [None, None, None] if trace is None else [[], [], []]

    if config.parallel:
        with ThreadPoolExecutor(max_workers=3) as pool:
            results = list(
                pool.map(_run_channel, planes, (config,) * 3, prev, labels, traces)
            )
    else:
        results = [
            _run_channel(p, config, pv, lb, tr)
            for p, pv, lb, tr in zip(planes, prev, labels, traces)
        ]

    firsts = {res[1] for res in results}
    totals = {res[2] for res in results}
    if len(firsts) != 1 or len(totals) != 1:
        raise AssertionError("channel pipelines disagree on timing")
    first_out = firsts.pop()
    total = totals.pop()
    pixels = image.width * image.height
    report = CycleReport(
        width=image.width,
        height=image.height,
        latency_cycles=first_out,
        total_cycles=total,
        pixels_out=pixels,
        steady_state_rate=pixels / (total - first_out),
    )
    if trace is not None:
        merged = [row for t in traces for row in t]
        merged.sort(key=lambda r: (r[0], _STAGE_ORDER[r[1]], r[2]))
        trace.extend(merged)
    return PipelineResult(
        image=RgbImage(*(res[0] for res in results)),
        report=report,
        stats_used=tuple(res[4] for res in results),
        frame_stats=tuple(res[3] for res in results),
        config=config,
    )


def run_video(frames: Iterable[RgbImage], config: PipelineConfig | None = None) -> list[PipelineResult]:
    """Run a frame sequence, chaining each frame's extrema into the next."""
    if config is None:
        config = PipelineConfig(stats_mode="previous_frame")
    results = []
    prev = None
    for frame in frames:
        res = pipeline_run(frame, config, prev_stats=prev)
        results.append(res)
        prev = res.frame_stats
    return results


def fps_model(width: int, height: int, clock_hz: float, latency_cycles: int) -> float:
    """Frames per second of a 1-pixel-per-clock pipeline with one-time latency."""
    if width <= 0 or height <= 0 or clock_hz <= 0:
        raise ValueError("width, height and clock must be positive")
    if latency_cycles < 0:
        raise ValueError("latency cannot be negative")
    return clock_hz / (width * height + latency_cycles)
