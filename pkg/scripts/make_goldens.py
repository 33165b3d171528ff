#!/usr/bin/env python3
"""Regenerate the golden stability reports for the six preset cases."""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from relequil.pipeline import AnalysisRequest, run_analysis
from relequil.presets import HOMOGENEOUS_PRESETS, PRESET_NAMES

OUT = pathlib.Path(__file__).resolve().parents[1] / "golden"


def main():
    OUT.mkdir(exist_ok=True)
    for name in PRESET_NAMES:
        alpha = 1.0 if name in HOMOGENEOUS_PRESETS else None
        report = run_analysis(AnalysisRequest(case=name, alpha=alpha))
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
