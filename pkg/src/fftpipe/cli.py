"""Command-line entry point.

Subcommands:
  run   drive a pipeline from an XML configuration file
  demo  run the built-in denoising workflow and write its four stage images
  fft   transform a PGM image and write the log-magnitude of the result

Exit codes: 0 success, 1 pipeline/runtime failure, 2 bad arguments. Every
error prints a single diagnostic line on stderr.
"""

from __future__ import annotations

import argparse
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

from .bridge import (
    BandpassStage,
    FftStage,
    ImageStage,
    PipelineSpec,
    ScaleConfig,
    ScaleStage,
    SourceConfig,
    load_config,
    run_pipeline,
)
from .datagen import GenConfig
from .fft_core import Direction
from .fft_endpoint import FftConfig, distributed_fft_2d
from .filters import BandpassConfig, display_magnitude
from .grid import Field, Mesh, to_complex
from .pgm import ImageConfig, ImageScaling, read_image, write_image

MESH_NAME = "mesh"
ARRAY_NAME = "dataArray"


def build_demo_spec(
    ny0: int, ny1: int, seed: int, keep_fraction: float, ranks: int
) -> PipelineSpec:
    """The built-in workflow: noisy radial source, forward transform,
    corner bandpass, inverse transform, normalization, one image per stage.

    The inverse output stays complex (its imaginary parts are only
    numerically zero), so the three post-transform images use log-magnitude
    rendering.
    """
    normalization = 1.0 / (ny0 * ny1)
    image = lambda path, scaling: ImageStage(  # noqa: E731
        ImageConfig(MESH_NAME, ARRAY_NAME, path, scaling)
    )
    fft = lambda direction: FftStage(  # noqa: E731
        FftConfig(MESH_NAME, ARRAY_NAME, direction, ranks=ranks)
    )
    return PipelineSpec(
        source=SourceConfig(gen=GenConfig(ny0=ny0, ny1=ny1, seed=seed)),
        stages=(
            image("01_noisy.pgm", ImageScaling.LINEAR),
            fft(Direction.FORWARD),
            image("02_spectrum.pgm", ImageScaling.LOG_MAGNITUDE),
            BandpassStage(BandpassConfig(MESH_NAME, ARRAY_NAME, keep_fraction)),
            image("03_filtered.pgm", ImageScaling.LOG_MAGNITUDE),
            fft(Direction.BACKWARD),
            ScaleStage(ScaleConfig(ARRAY_NAME, normalization)),
            image("04_denoised.pgm", ImageScaling.LOG_MAGNITUDE),
        ),
    )


class _OneLineParser(argparse.ArgumentParser):
    """argparse parser whose errors are a single stderr line (no usage dump)."""

    def error(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> argparse.ArgumentParser:
    parser = _OneLineParser(prog="fftpipe")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a pipeline from an XML config")
    run_p.add_argument("--config", required=True, help="pipeline XML file")
    run_p.add_argument("--steps", type=int, default=1)
    run_p.add_argument("--out", default="out", help="output directory")

    demo_p = sub.add_parser("demo", help="run the built-in denoising workflow")
    demo_p.add_argument("--grid", default="200x200", help="grid size, e.g. 200x200")
    demo_p.add_argument("--seed", type=int, default=42)
    demo_p.add_argument("--keep", type=float, default=0.0075, help="bandpass keep fraction")
    demo_p.add_argument("--ranks", type=int, default=1)
    demo_p.add_argument("--steps", type=int, default=1)
    demo_p.add_argument("--out", default="out", help="output directory")

    fft_p = sub.add_parser("fft", help="transform a PGM image")
    fft_p.add_argument("input", help="input PGM file")
    fft_p.add_argument(
        "--direction", choices=("forward", "backward"), default="forward"
    )
    fft_p.add_argument("--ranks", type=int, default=1)
    fft_p.add_argument("--out", default="out", help="output directory")
    return parser


def _usage_error(message: str) -> int:
    print(f"fftpipe: error: {message}", file=sys.stderr)
    return 2


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"grid must look like 200x200, got '{text}'")
    ny0, ny1 = (int(p) for p in parts)
    if ny0 < 1 or ny1 < 1:
        raise ValueError(f"grid dimensions must be positive, got '{text}'")
    return ny0, ny1


def _cmd_run(args: argparse.Namespace) -> int:
    spec = load_config(args.config)
    run_pipeline(spec, steps=args.steps, out_dir=args.out)
    return 0


def _cmd_demo(args: argparse.Namespace) -> int:
    ny0, ny1 = args.grid
    spec = build_demo_spec(ny0, ny1, args.seed, args.keep, args.ranks)
    run_pipeline(spec, steps=args.steps, out_dir=args.out)
    return 0


def _cmd_fft(args: argparse.Namespace) -> int:
    field = to_complex(read_image(args.input))
    direction = Direction.FORWARD if args.direction == "forward" else Direction.BACKWARD
    spectrum = distributed_fft_2d(
        field.values, field.ny0, field.ny1, direction, args.ranks
    )
    mesh = Mesh(MESH_NAME, field.ny0, field.ny1).add_field(Field(field.name, spectrum))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / f"{Path(args.input).stem}_mag.pgm"
    write_image(
        mesh,
        ImageConfig(MESH_NAME, field.name, str(target), ImageScaling.LOG_MAGNITUDE),
    )
    print(target)
    return 0


def _validate(args: argparse.Namespace) -> str | None:
    if getattr(args, "steps", 1) < 1:
        return f"--steps must be >= 1, got {args.steps}"
    if getattr(args, "ranks", 1) < 1:
        return f"--ranks must be >= 1, got {args.ranks}"
    if args.command == "demo":
        if not 0.0 <= args.keep <= 1.0:
            return f"--keep must be in [0, 1], got {args.keep}"
        try:
            args.grid = _parse_grid(args.grid)
        except ValueError as exc:
            return str(exc)
    return None


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    problem = _validate(args)
    if problem is not None:
        return _usage_error(problem)
    handler = {"run": _cmd_run, "demo": _cmd_demo, "fft": _cmd_fft}[args.command]
    try:
        return handler(args)
    except ET.ParseError as exc:
        print(f"fftpipe: config parse error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, LookupError, RuntimeError, TypeError) as exc:
        print(f"fftpipe: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
