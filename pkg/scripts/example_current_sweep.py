#!/usr/bin/env python3
"""Sweep the scaled effective current of the example state over the
precision width and locate the sign change.

Writes example_current.csv next to this script (or to --out) and prints
the critical width.  The negative region of the table is where the
smoothed criterion still detects backflow.
"""

import argparse
import os
from pathlib import Path

import numpy as np

from backflow.efexample import critical_width, example_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--start", type=float, default=0.1)
    parser.add_argument("--stop", type=float, default=10.0)
    parser.add_argument("--points", type=int, default=200)
    parser.add_argument("--out", default=str(Path(__file__).parent / "example_current.csv"))
    args = parser.parse_args()

    workers = int(os.environ.get("QB_THREADS", "0")) or (os.cpu_count() or 1)
    sweep = example_sweep(
        np.linspace(args.start, args.stop, args.points), max_workers=workers
    )
    Path(args.out).write_text(sweep.to_csv())
    s_star = critical_width(1e-6)
    negative = sum(1 for v in sweep.values() if v < 0)
    print(f"wrote {args.points} rows to {args.out}")
    print(f"backflow (negative current) at {negative} of {args.points} widths")
    print(f"critical width s* = {s_star:.6f}")


if __name__ == "__main__":
    main()
