import json

import pytest

from trms_ftc.cli import main

SHORT_SCENARIO = {
    "fault": {"kind": "step", "channels": [1], "amplitude": 0.3,
              "t_start": 0.5, "t_stop": 1.0},
    "sim": {"t_end": 1.2,
            "references": {"alpha_v": [[0.0, 0.0]], "alpha_h": [[0.0, 0.0]]},
            "initial_state": {"trim": [0.0, 0.0]}},
}


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(SHORT_SCENARIO))
    return str(path)


class TestSimCommand:
    def test_writes_trace(self, config_file, tmp_path, capsys):
        out = str(tmp_path / "trace.csv")
        assert main(["sim", "--config", config_file, "--out", out]) == 0
        lines = open(out).read().splitlines()
        assert lines[0].startswith("t,x1")
        assert len(lines) == 1202
        assert "wrote 1201 samples" in capsys.readouterr().out

    def test_bad_config_exits_nonzero(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"sim": {"dt": -1}}))
        with pytest.raises(SystemExit):
            main(["sim", "--config", str(bad), "--out", str(tmp_path / "x.csv")])


class TestDesignAndLinearize:
    def test_design_writes_document(self, config_file, tmp_path):
        out = str(tmp_path / "gains.json")
        assert main(["design", "--config", config_file, "--out", out]) == 0
        doc = json.load(open(out))
        assert doc["schema"] == "trms-ftc/design-v1"
        assert len(doc["gains"]["k1"]) == 3

    def test_linearize_writes_bank(self, config_file, tmp_path):
        out = str(tmp_path / "bank.json")
        assert main(["linearize", "--config", config_file, "--out", out]) == 0
        doc = json.load(open(out))
        assert doc["schema"] == "trms-ftc/bank-v1"
        assert len(doc["models"]) == 3


class TestMetricsCommand:
    def test_prints_metrics_json(self, config_file, tmp_path, capsys):
        trace = str(tmp_path / "trace.csv")
        main(["sim", "--config", config_file, "--out", trace])
        capsys.readouterr()
        assert main(["metrics", "--trace", trace]) == 0
        body = json.loads(capsys.readouterr().out)
        assert body["rms_pitch_pre"] is not None
        assert body["rms_pitch_post"] is not None

    def test_optional_out_file(self, config_file, tmp_path, capsys):
        trace = str(tmp_path / "trace.csv")
        main(["sim", "--config", config_file, "--out", trace])
        out = str(tmp_path / "metrics.json")
        main(["metrics", "--trace", trace, "--out", out])
        assert json.load(open(out))["sat_duty_main"] >= 0.0
