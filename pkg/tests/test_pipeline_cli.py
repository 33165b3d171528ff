import json
import pathlib

import numpy as np
import pytest

from relequil.central import regular_polygon
from relequil.cli import main as cli_main
from relequil.pipeline import (
    AnalysisRequest,
    InputError,
    StabilityReport,
    polygon_group_for,
    run_analysis,
    run_sweep,
)
from relequil.presets import HOMOGENEOUS_PRESETS, PRESET_NAMES

GOLDEN_DIR = pathlib.Path(__file__).resolve().parents[1] / "golden"


def _preset_request(name):
    alpha = 1.0 if name in HOMOGENEOUS_PRESETS else None
    return AnalysisRequest(case=name, alpha=alpha)


class TestRequestResolution:
    def test_unknown_case(self):
        with pytest.raises(InputError):
            AnalysisRequest(case="heptagon-special").resolve()

    def test_alpha_on_quasi_case_rejected(self):
        with pytest.raises(InputError):
            AnalysisRequest(case="manev-triangle", alpha=2.0).resolve()

    def test_explicit_positions(self):
        tri = regular_polygon(3)
        cfg, spec, case = AnalysisRequest(
            positions=tuple(tri.positions), alpha=1.0
        ).resolve()
        assert case is None
        assert cfg.n == 3
        assert spec.terms == ((1.0, 1.0),)

    def test_missing_everything(self):
        with pytest.raises(InputError):
            AnalysisRequest().resolve()

    def test_noncentral_explicit_rejected(self, rng):
        pos = rng.uniform(-1, 1, size=8)
        # keep bodies apart so construction succeeds
        pos = pos + np.array([0, 0, 3, 0, 0, 3, 3, 3.0])
        with pytest.raises(InputError):
            run_analysis(AnalysisRequest(positions=tuple(pos), alpha=1.0))


class TestPolygonGroupDetection:
    def test_detects_rotated_polygon(self):
        cfg = regular_polygon(4).rotated(0.31)
        group = polygon_group_for(cfg)
        assert group is not None and group.order == 8

    def test_rejects_non_polygon(self, rng):
        from conftest import random_safe_configuration

        cfg = random_safe_configuration(rng)
        assert polygon_group_for(cfg) is None

    def test_rejects_unequal_masses(self):
        from relequil.model import BodyConfiguration

        tri = regular_polygon(3)
        cfg = BodyConfiguration(np.array([1.0, 2.0, 1.0]), tri.positions)
        assert polygon_group_for(cfg) is None


class TestReports:
    def test_json_round_trip_bit_exact(self):
        report = run_analysis(_preset_request("manev-triangle"))
        text = json.dumps(report.to_dict())
        recovered = StabilityReport.from_dict(json.loads(text))
        assert json.dumps(recovered.to_dict()) == text

    def test_determinism(self):
        a = run_analysis(_preset_request("schwarzschild-square"))
        b = run_analysis(_preset_request("schwarzschild-square"))
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_matches_golden_file(self, name):
        golden = json.loads((GOLDEN_DIR / f"{name}.json").read_text())
        report = run_analysis(_preset_request(name))
        assert report.to_dict() == golden

    def test_schema_version_checked(self):
        report = run_analysis(_preset_request("triangle-homogeneous"))
        data = dict(report.to_dict())
        data["schema_version"] = 99
        with pytest.raises(InputError):
            StabilityReport.from_dict(data)

    def test_reference_values_present_with_flags(self):
        report = run_analysis(_preset_request("manev-square"))
        om = report.to_dict()["omega_squared"]
        assert om["reference"]["suspect"] is True
        assert om["agrees"] is False
        assert any("omega^2" in d for d in report.discrepancies)

    def test_render_table_mentions_verdict(self):
        report = run_analysis(_preset_request("triangle-homogeneous"))
        text = report.render_table()
        assert "spectrally-unstable" in text
        assert "omega^2" in text

    def test_explicit_pentagon_runs_end_to_end(self):
        pent = regular_polygon(5)
        report = run_analysis(
            AnalysisRequest(positions=tuple(pent.positions), alpha=1.0)
        )
        assert report.matches_oracle
        assert len(report.to_dict()["coupled_blocks"]) == 1


class TestSweep:
    def test_trichotomy_labels(self):
        result = run_sweep(
            AnalysisRequest(case="triangle-homogeneous"), [1.9, 2.0, 2.1]
        )
        assert dict(result.summary) == {
            1.9: "pure-imaginary", 2.0: "zero", 2.1: "real"
        }

    def test_all_verdicts_unstable_across_grid(self):
        result = run_sweep(
            AnalysisRequest(case="triangle-homogeneous"),
            [0.5, 1.0, 1.5, 2.0, 3.0],
        )
        assert not result.failures
        for _, report in result.reports:
            assert report.verdict == "spectrally-unstable"

    def test_empty_grid(self):
        result = run_sweep(AnalysisRequest(case="triangle-homogeneous"), [])
        assert result.reports == () and result.summary == ()


class TestCli:
    def test_analyze_json(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code = cli_main([
            "analyze", "--case", "triangle-homogeneous", "--alpha", "1.0",
            "--format", "json", "--out", str(out),
        ])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["verdict"]["verdict"] == "spectrally-unstable"

    def test_analyze_unknown_case_exit_2(self, capsys):
        code = cli_main(["analyze", "--case", "triangle-homogeneous",
                         "--alpha", "1.0", "--potential", "1:1"])
        assert code == 2

    def test_analyze_noncentral_exit_2(self, capsys):
        code = cli_main([
            "analyze", "--positions", "0,0.9,1,0,2.2,0", "--alpha", "1.0",
        ])
        assert code == 2

    def test_sweep_table(self, capsys):
        code = cli_main([
            "sweep", "--case", "triangle-homogeneous", "--grid", "1.9,2.0,2.1",
        ])
        assert code == 0
        text = capsys.readouterr().out
        assert "pure-imaginary" in text and "zero" in text and "real" in text

    def test_presets_listing(self, capsys):
        code = cli_main(["presets"])
        assert code == 0
        text = capsys.readouterr().out
        for name in PRESET_NAMES:
            assert name in text

    def test_simulate(self, capsys, tmp_path):
        out = tmp_path / "sim.json"
        code = cli_main([
            "simulate", "--case", "schwarzschild-square", "--periods", "1",
            "--steps-per-period", "2000", "--format", "json",
            "--out", str(out),
        ])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["equilibrium_drift"] < 1e-8
        assert not data["blew_up"]

    def test_simulate_dump_has_states(self, capsys, tmp_path):
        out = tmp_path / "dump.json"
        code = cli_main([
            "simulate", "--case", "triangle-homogeneous", "--alpha", "1.0",
            "--periods", "0.02", "--steps-per-period", "1000",
            "--dump", "--format", "json", "--out", str(out),
        ])
        assert code == 0
        data = json.loads(out.read_text())
        assert len(data["trajectory"]) > 1
        assert len(data["trajectory"][0]["state"]) == 12

    def test_out_dir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("RELEQUIL_OUT_DIR", str(tmp_path))
        code = cli_main(["presets", "--format", "json"])
        assert code == 0
        assert (tmp_path / "presets.json").exists()
