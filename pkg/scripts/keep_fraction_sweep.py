#!/usr/bin/env python3
"""Sweep the bandpass keep fraction and tabulate denoising quality.

Shows the retention/fidelity trade-off: too small a radius discards signal,
too large readmits noise.
"""

import argparse

import numpy as np

from fftpipe.filters import retention_radius
from fftpipe.workflow import denoise


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=200, help="square grid size")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument(
        "--fractions",
        type=float,
        nargs="+",
        default=[0.0, 0.0025, 0.005, 0.0075, 0.01, 0.02, 0.05, 0.1],
    )
    args = parser.parse_args()

    baseline = denoise(args.grid, args.grid, args.seed, keep_fraction=1.0)
    print(f"rmse(noisy, clean) = {baseline.rmse_noisy:.4f}")
    print(f"{'keep':>8} {'radius':>6} {'kept coeffs':>11} {'rmse':>10}")
    for f in args.fractions:
        result = denoise(args.grid, args.grid, args.seed, keep_fraction=f)
        kept = int(np.count_nonzero(result.filtered))
        r = retention_radius(f, args.grid)
        print(f"{f:8.4f} {r:6d} {kept:11d} {result.rmse_denoised:10.4f}")


if __name__ == "__main__":
    main()
