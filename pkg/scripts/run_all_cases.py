#!/usr/bin/env python3
"""Run the six standard cases and print one summary line per case."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from relequil.pipeline import AnalysisRequest, run_analysis
from relequil.presets import HOMOGENEOUS_PRESETS, PRESET_NAMES


def main():
    print(f"{'case':<24} {'omega^2':>12} {'max Re':>10} {'block-oracle':>13} verdict")
    for name in PRESET_NAMES:
        alpha = 1.0 if name in HOMOGENEOUS_PRESETS else None
        report = run_analysis(AnalysisRequest(case=name, alpha=alpha))
        d = report.to_dict()
        print(
            f"{name:<24} {d['omega_squared']['computed']:>12.8f} "
            f"{d['verdict']['max_real_part']:>10.6f} "
            f"{d['spectra_match']['max_distance']:>13.2e} "
            f"{d['verdict']['verdict']}"
        )
        for note in report.discrepancies:
            print(f"    note: {note}")


if __name__ == "__main__":
    main()
