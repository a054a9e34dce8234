"""Command-line interface: enhance, compare, simulate, bench.

All commands are deterministic for identical inputs and flags (wall-clock
benchmark fields excepted).  Exit status is 0 exactly when no error was
reported.
"""

from __future__ import annotations

import argparse
import sys

from . import bench as bench_mod
from . import golden, hwmodel, metrics, pnm, report


def _error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _load(path) -> golden.RgbImage:
    try:
        return pnm.read_ppm_file(path)
    except FileNotFoundError:
        raise RuntimeError(f"cannot read {path}: file not found")
    except OSError as e:
        raise RuntimeError(f"cannot read {path}: {e}")
    except pnm.PpmError as e:
        raise RuntimeError(f"{path}: {e}")


def _fmt_db(value: float) -> str:
    return "inf" if value == float("inf") else f"{value:.4f}"


def cmd_enhance(args) -> int:
    image = _load(args.input)
    if args.model == "hw":
        if args.k != 1.5 or args.scale != 32.0:
            raise RuntimeError(
                "the hardware model has k=1.5 and scale=32 baked into its datapath; "
                "use --model golden for other values"
            )
        config = hwmodel.PipelineConfig(
            border=args.border, stats_mode=args.stats_mode, parallel=args.parallel
        )
        enhanced = hwmodel.pipeline_run(image, config).image
    else:
        params = golden.EnhanceParams(k=args.k, scale=args.scale, border=args.border)
        enhanced = golden.enhance_rgb(image, params)
    pnm.write_ppm_file(args.output, enhanced, format=args.format)
    print(
        f"{image.width}x{image.height} model={args.model} border={args.border} "
        f"psnr_vs_input={_fmt_db(metrics.psnr(enhanced, image))} dB -> {args.output}"
    )
    return 0


def cmd_compare(args) -> int:
    a = _load(args.a)
    b = _load(args.b)
    try:
        value = metrics.psnr(a, b)
        stats = metrics.diff_stats(a, b)
    except ValueError as e:
        raise RuntimeError(str(e))
    print(f"psnr_db={_fmt_db(value)}")
    print(
        f"max_abs_diff={stats.max_abs_diff} mean_abs_diff={stats.mean_abs_diff:.6f} "
        f"count_nonzero={stats.count_nonzero}"
    )
    if args.figure:
        report.save_compare_figure(a, b, args.figure, labels=(str(args.a), str(args.b)))
        print(f"figure -> {args.figure}")
    return 0


def cmd_simulate(args) -> int:
    image = _load(args.input)
    config = hwmodel.PipelineConfig(
        border=args.border,
        stats_mode=args.stats_mode,
        fifo_depth=args.fifo_depth,
        parallel=args.parallel,
    )
    trace = [] if args.trace else None
    result = hwmodel.pipeline_run(image, config, trace=trace)
    rep = result.report
    print(f"width={rep.width} height={rep.height}")
    print(f"latency_cycles={rep.latency_cycles}")
    print(f"total_cycles={rep.total_cycles}")
    print(f"pixels_out={rep.pixels_out}")
    print(f"steady_state_rate={rep.steady_state_rate}")
    print(f"stats_mode={result.stats_used[0].source}")
    clock = bench_mod.PROJECTION_CLOCK_HZ
    print(f"projected_fps@{clock / 1e6:.3f}MHz={rep.projected_fps(clock):.2f}")
    if args.trace:
        with open(args.trace, "w") as f:
            f.write("cycle,stage,channel,value,valid\n")
            for cycle, stage, channel, value, valid in trace:
                f.write(f"{cycle},{stage},{channel},{value},{valid}\n")
        print(f"trace -> {args.trace}")
    if args.output:
        pnm.write_ppm_file(args.output, result.image, format=args.format)
        print(f"enhanced -> {args.output}")
    return 0


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise RuntimeError(f"--sizes must be comma-separated integers, got {args.sizes!r}")
    try:
        rows = bench_mod.run_bench(sizes, reps=args.reps, which=args.impl, parallel=args.parallel)
    except ValueError as e:
        raise RuntimeError(str(e))
    csv = bench_mod.to_csv(rows)
    if args.output:
        with open(args.output, "w") as f:
            f.write(csv)
        print(f"csv -> {args.output}")
    else:
        sys.stdout.write(csv)
    if args.figure:
        report.save_bench_figure(rows, args.figure)
        print(f"figure -> {args.figure}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussenhance",
        description="Gaussian-smoothing / log2 dynamic-range-compression image enhancer "
        "with a bit-faithful streaming hardware model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="enhance a PPM image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--model", choices=("golden", "hw"), default="golden")
    p.add_argument("--border", choices=golden.BORDER_POLICIES, default="replicate")
    p.add_argument("--stats-mode", choices=hwmodel.STATS_MODES, default="two_pass",
                   help="frame-extrema source (hardware model)")
    p.add_argument("--k", type=float, default=1.5, help="log gain")
    p.add_argument("--scale", type=float, default=32.0, help="post-log scale")
    p.add_argument("--format", choices=("P6", "P3"), default="P6")
    p.add_argument("--parallel", action="store_true", help="run the three channels on threads")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("compare", help="PSNR and difference stats between two PPMs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--figure", help="write a side-by-side + difference figure (PNG)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="run the hardware model and report cycle accounting")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="write the enhanced PPM here")
    p.add_argument("--border", choices=golden.BORDER_POLICIES, default="replicate")
    p.add_argument("--stats-mode", choices=hwmodel.STATS_MODES, default="two_pass")
    p.add_argument("--fifo-depth", type=int, default=None,
                   help="override the row-FIFO depth (default: aligned automatically)")
    p.add_argument("--trace", help="write a per-stage event trace CSV here")
    p.add_argument("--format", choices=("P6", "P3"), default="P6")
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="throughput benchmark, CSV report")
    p.add_argument("--sizes", default="32,64,128", help="comma-separated square sizes")
    p.add_argument("--reps", type=int, default=5, help="timing repetitions (median taken)")
    p.add_argument("--impl", choices=("golden", "hw"), default="golden")
    p.add_argument("--output", help="write CSV here instead of stdout")
    p.add_argument("--figure", help="render the report as a PNG figure")
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RuntimeError as e:
        return _error(str(e))
    except (ValueError, OSError) as e:
        return _error(str(e))


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
