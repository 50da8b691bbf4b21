"""Command-line interface.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import runner
from .config import ConfigError, load_config
from .evaluation import MetricsRow, aggregate, format_table, to_csv
from .frame_io import (
    FrameIOError,
    SequenceSpec,
    ensure_writable_dir,
    load_cdnet_sequence,
    load_sequence,
    prefetch,
)
from .pipeline import GeometryChangeError, Pipeline, PipelineStateError
from .synthetic import KINDS, SyntheticSpec, iter_sequence, write_sequence

log = logging.getLogger("dynbgs")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, need_out: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="directory of input frames")
    src.add_argument("--cdnet", type=Path, help="CDnet sequence directory")
    p.add_argument("--out", type=Path, required=need_out, help="output directory")
    _add_config(p)


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--set", action="append", default=[], metavar="K=V",
                   help="override one config key (repeatable; wins over --config)")
    p.add_argument("--seed", type=int, help="RNG seed (same as --set seed=N)")
    p.add_argument("--threads", type=int, default=1, help="worker threads per frame")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dynbgs", description="Background subtraction with dynamic-background re-checking")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="segment a sequence and write bin%%06d masks")
    _add_common(p)
    p.add_argument("--mask-format", choices=("png", "pgm"), help="mask file format")
    p.add_argument("--dump-state-every", type=int, default=0, metavar="K",
                   help="also dump controller maps every K frames")

    p = sub.add_parser("evaluate", help="run and score against CDnet ground truth")
    p.add_argument("--cdnet", type=Path, required=True,
                   help="CDnet sequence, category or dataset directory")
    p.add_argument("--out", type=Path, help="write masks and metrics.csv here")
    p.add_argument("--reference-precision", type=float,
                   help="published overall precision to compare against (advisory +-0.05 band)")
    p.add_argument("--mask-format", choices=("png", "pgm"))
    _add_config(p)

    p = sub.add_parser("bench", help="time the pipeline (no mask writes)")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", type=Path)
    src.add_argument("--cdnet", type=Path)
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--frames", type=int, default=60)
    p.add_argument("--out", type=Path, help="write timing.txt here")
    _add_config(p)

    p = sub.add_parser("synth", help="write a synthetic sequence with exact ground truth")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=240)
    p.add_argument("--frames", type=int, default=300)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box-size", type=int, nargs=2, default=(40, 40), metavar=("W", "H"))
    p.add_argument("--velocity", type=int, nargs=2, default=(2, 0), metavar=("DX", "DY"))
    p.add_argument("--band-height", type=int, default=60)
    p.add_argument("--flip-prob", type=float, default=0.3)
    p.add_argument("--format", choices=("ppm", "png"), default="ppm")

    p = sub.add_parser("dump-state", help="process K frames, then write controller maps")
    _add_common(p)
    p.add_argument("--frame", type=int, required=True, metavar="K")
    return parser


def _config(args):
    overrides = list(args.set)
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    return load_config(args.config, overrides)


def _spec(args) -> SequenceSpec:
    if getattr(args, "cdnet", None) is not None:
        return load_cdnet_sequence(args.cdnet)
    return SequenceSpec(input_dir=args.input)


def _ext(args) -> Optional[str]:
    fmt = getattr(args, "mask_format", None)
    return f".{fmt}" if fmt else None


def cmd_run(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    stats = runner.run(_spec(args), _config(args), args.out, args.threads, _ext(args),
                       args.dump_state_every)
    timing = stats.timing()
    print(f"{stats.frames} frames -> {args.out}  "
          f"({timing['fps_pipeline']} fps pipeline, {timing['fps_with_io']} fps with I/O)")
    return EXIT_OK


def discover_sequences(root: Path):
    """(category, sequence, path) for a sequence, category or dataset root."""
    root = Path(root)
    if (root / "input").is_dir():
        return [(root.resolve().parent.name, root.name, root)]
    found = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        if (sub / "input").is_dir():
            found.append((root.name, sub.name, sub))
            continue
        for seq in sorted(p for p in sub.iterdir() if p.is_dir()):
            if (seq / "input").is_dir():
                found.append((sub.name, seq.name, seq))
    return found


def cmd_evaluate(args) -> int:
    config = _config(args)
    if not args.cdnet.is_dir():
        raise FrameIOError(f"not a directory: {args.cdnet}")
    sequences = discover_sequences(args.cdnet)
    if not sequences:
        raise FrameIOError(f"no CDnet sequences (directories with input/) under {args.cdnet}")
    if args.out is not None:
        ensure_writable_dir(args.out)
    rows: List[MetricsRow] = []
    for category, name, path in sequences:
        log.info("evaluating %s/%s", category, name)
        out = args.out / category / name if args.out is not None else None
        row, _ = runner.evaluate(load_cdnet_sequence(path), config, name, category,
                                 args.threads, out, _ext(args))
        rows.append(row)
    agg = aggregate(rows)
    print(format_table(rows, agg))
    if args.reference_precision is not None and agg.overall["precision"] is not None:
        delta = agg.overall["precision"] - args.reference_precision
        verdict = "within" if abs(delta) <= 0.05 else "outside"
        print(f"overall precision {agg.overall['precision']:.4f} vs reference "
              f"{args.reference_precision:.4f} (delta {delta:+.4f}, {verdict} advisory +-0.05 band)")
    if args.out is not None:
        (args.out / "metrics.csv").write_text(to_csv(rows))
    empty = [r.sequence for r in rows if r.confusion.total == 0]
    if empty:
        print(f"error: no evaluated pixels in: {', '.join(empty)}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _config(args)
    if args.input is not None or args.cdnet is not None:
        frames = list(load_sequence(_spec(args)))
        source = str(args.input or args.cdnet)
    else:
        side = max(1, min(args.width, args.height) // 6)
        spec = SyntheticSpec("moving_box", width=args.width, height=args.height,
                             frames=args.frames, seed=config.seed, box_size=(side, side))
        try:
            spec.validate()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        frames = [f for f, _ in iter_sequence(spec)]
        source = f"synthetic moving_box {args.width}x{args.height}"
    # compile kernels outside the timed region
    warm = Pipeline(config)
    for frame in frames[:2]:
        warm.process_frame(frame)
    stats = runner.bench(frames, config, args.threads)
    timing = stats.timing()
    print(f"source={source}")
    print(runner.format_kv({"threads": args.threads, **timing}), end="")
    if args.out is not None:
        ensure_writable_dir(args.out)
        (args.out / "timing.txt").write_text(runner.format_kv(timing))
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        kind=args.kind, width=args.width, height=args.height, frames=args.frames,
        noise_sigma=args.sigma, seed=args.seed, box_size=tuple(args.box_size),
        box_velocity=tuple(args.velocity), band_height=args.band_height, flip_prob=args.flip_prob,
    )
    try:
        spec.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_sequence(spec, args.out, f".{args.format}")
    print(f"wrote {args.frames} frames to {args.out}")
    return EXIT_OK


def cmd_dump_state(args) -> int:
    if args.frame < 1:
        raise PipelineStateError("--frame must be >= 1: state is undefined before frame 1")
    pipeline = Pipeline(_config(args), threads=args.threads)
    for frame in prefetch(load_sequence(_spec(args))):
        pipeline.process_frame(frame)
        if pipeline.index == args.frame:
            break
    if pipeline.index < args.frame:
        raise FrameIOError(f"sequence has only {pipeline.index} frames, asked for {args.frame}")
    ensure_writable_dir(args.out)
    for name, path in pipeline.dump_state(args.out).items():
        print(f"{name}: {path}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
    "synth": cmd_synth,
    "dump-state": cmd_dump_state,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError, PipelineStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FrameIOError, GeometryChangeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
