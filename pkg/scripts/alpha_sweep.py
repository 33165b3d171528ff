#!/usr/bin/env python3
"""Sweep the exponent for the triangle and print the mode trichotomy."""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from relequil.pipeline import AnalysisRequest, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--case", default="triangle-homogeneous")
    ap.add_argument(
        "--grid", default="0.5,1.0,1.5,1.9,2.0,2.1,2.5,3.0",
        help="comma-separated exponents",
    )
    args = ap.parse_args()
    grid = [float(x) for x in args.grid.split(",")]
    result = run_sweep(AnalysisRequest(case=args.case), grid)
    print(result.render_table())


if __name__ == "__main__":
    main()
