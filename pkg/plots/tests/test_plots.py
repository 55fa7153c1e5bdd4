"""Render every figure kind from files produced by the phasekit CLI.

The analysis package is exercised strictly through its command line (the
documented external interface); this suite only depends on the files it
writes.
"""

import json
import os
import subprocess
import sys

import pytest

from phaseplots.cli import main
from phaseplots.io import PlotInputError
from phaseplots.render import plot_nyquist_regions


def run_phasekit(*argv, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "phasekit.cli", *argv],
        cwd=cwd, capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def outputs(tmp_path_factory):
    """Bundled benchmark and Lur'e outputs, generated once via the CLI."""
    work = tmp_path_factory.mktemp("cli-out")
    plant = work / "plant.json"
    plant.write_text(json.dumps({
        "kind": "tf",
        "entries": [
            [{"num": [1.0, 6.0], "den": [1.0, 0.1, 1.0]},
             {"num": [0.2], "den": [1.0, 1.0, 0.1]}],
            [{"num": [1.0, 3.0], "den": [1.0, 4.0, 1.0]},
             {"num": [1.0, 4.0], "den": [1.0, 1.0, 1.0]}],
        ],
    }))
    lag = work / "lag.json"
    lag.write_text(json.dumps({
        "kind": "tf", "entries": [[{"num": [1.0], "den": [1.0, 1.0]}]],
    }))
    sector = work / "sector.json"
    sector.write_text(json.dumps({"kind": "sector", "a": 0.5, "b": 1.5}))
    quant = work / "quant.json"
    quant.write_text(json.dumps({"kind": "quantizer", "rho": 1.0 / 3.0}))
    exp = work / "experiment.json"
    exp.write_text(json.dumps({
        "P": str(plant),
        "C": {"kind": "nl", "name": "cubic2"},
        "e1": {"pulses": [{"channel": 0, "start": 0.0, "stop": 1.0},
                          {"channel": 1, "start": 2.0, "stop": 3.0}]},
        "e2": {"pulses": [{"channel": 0, "start": 4.0, "stop": 5.0},
                          {"channel": 1, "start": 6.0, "stop": 7.0}]},
        "dt": 5e-3,
        "duration": 20.0,
    }))

    run_phasekit("analyze-lti", str(plant), "--out", "lti_report.json",
                 "--csv", "per_freq.csv", cwd=work)
    run_phasekit("analyze-nl", str(quant), "--out", "nl_report.json",
                 "--samples-csv", "samples.csv",
                 "--corpus-size", "16", "--corpus-length", "2048", cwd=work)
    run_phasekit("check-feedback", str(lag), str(sector),
                 "--out", "verdict.json", "--nyquist-csv", "curve.csv",
                 "--points", "400", "--corpus-size", "6",
                 "--corpus-length", "1024", cwd=work)
    run_phasekit("simulate", str(exp), "--out-dir", "run", cwd=work)
    return work


class TestRendering:
    def test_nyquist_regions(self, outputs, tmp_path):
        out = str(tmp_path / "nyquist.png")
        rc = main(["nyquist-regions", str(outputs / "verdict.json"),
                   str(outputs / "curve.csv"), "--out", out])
        assert rc == 0
        assert os.path.getsize(out) > 0

    def test_nrange_with_report_rays(self, outputs, tmp_path):
        out = str(tmp_path / "nrange.png")
        rc = main(["nrange", str(outputs / "samples.csv"),
                   str(outputs / "nl_report.json"), "--out", out])
        assert rc == 0
        assert os.path.getsize(out) > 0

    def test_nrange_without_report(self, outputs, tmp_path):
        out = str(tmp_path / "nrange2.png")
        rc = main(["nrange", str(outputs / "samples.csv"), "--out", out])
        assert rc == 0

    def test_phase_envelope(self, outputs, tmp_path):
        out = str(tmp_path / "envelope.png")
        rc = main(["phase-envelope", str(outputs / "per_freq.csv"), "--out", out])
        assert rc == 0
        assert os.path.getsize(out) > 0

    def test_traces(self, outputs, tmp_path):
        out = str(tmp_path / "traces.png")
        rc = main(["traces", str(outputs / "run"), "--out", out])
        assert rc == 0
        assert os.path.getsize(out) > 0


class TestSchemaMismatch:
    def test_wrong_schema_name(self, outputs, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        doc = json.loads((outputs / "verdict.json").read_text())
        doc["schema"] = "phasekit/verdict-v999"
        bad.write_text(json.dumps(doc))
        rc = main(["nyquist-regions", str(bad), str(outputs / "curve.csv"),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 1
        assert "schema" in capsys.readouterr().err

    def test_missing_keys_named(self, outputs, tmp_path, capsys):
        doc = json.loads((outputs / "verdict.json").read_text())
        for c in doc["criteria"]:
            c["inputs"].pop("disk_center", None)
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        rc = main(["nyquist-regions", str(bad), str(outputs / "curve.csv"),
                   "--out", str(tmp_path / "x.png")])
        assert rc == 1
        assert "disk_center" in capsys.readouterr().err

    def test_missing_csv_column_named(self, outputs, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        lines = (outputs / "per_freq.csv").read_text().splitlines()
        bad.write_text("\n".join(["w,lo_rad"] +
                                 [",".join(l.split(",")[:2]) for l in lines[1:]]))
        rc = main(["phase-envelope", str(bad), "--out", str(tmp_path / "x.png")])
        assert rc == 1
        assert "hi_rad" in capsys.readouterr().err

    def test_missing_trace_file_named(self, outputs, tmp_path, capsys):
        rc = main(["traces", str(tmp_path), "--out", str(tmp_path / "x.png")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "e1.csv" in err

    def test_cone_criteria_required(self, outputs, tmp_path, capsys):
        doc = json.loads((outputs / "verdict.json").read_text())
        doc["criteria"] = [c for c in doc["criteria"]
                           if c["criterion"] not in ("circle", "phase-cone")]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        with pytest.raises(PlotInputError, match="missing keys"):
            plot_nyquist_regions(str(bad), str(outputs / "curve.csv"),
                                 str(tmp_path / "x.png"))
