import csv
import io
import json
import logging
import math

import numpy as np
import pytest

from recursive_drag.cli import EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, main
from recursive_drag.model import DEFAULT_DELTA2


def _pulse_table(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    assert rows[0] == ["t_ns", "omega_x", "omega_y", "delta"]
    return np.array(rows[1:], dtype=float)


class TestTmin:
    def test_r1d_closed_form(self, capsys):
        assert main(["tmin", "--family", "r1d", "--n", "3"]) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["results"]["T_min_ns"] == pytest.approx(math.sqrt(6) * math.pi / abs(DEFAULT_DELTA2))
        assert document["results"]["kind"] == "r1d"
        assert len(document["config_hash"]) == 16

    def test_r2d_closed_form(self, capsys):
        assert main(["tmin", "--family", "r2d", "--shape", "sin-pow", "--n", "3"]) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["results"]["T_min_ns"] == pytest.approx(2 * math.pi / abs(DEFAULT_DELTA2))

    def test_drag_has_no_minimum(self, capsys):
        assert main(["tmin", "--family", "drag"]) == EXIT_CONFIG
        assert "family" in capsys.readouterr().err


class TestArguments:
    def test_unknown_flag(self):
        assert main(["pulse", "--colour", "red"]) == EXIT_CONFIG

    def test_unknown_family(self):
        assert main(["pulse", "--family", "gaussian"]) == EXIT_CONFIG

    def test_too_few_levels(self, capsys):
        assert main(["simulate", "--levels", "2"]) == EXIT_CONFIG
        assert "levels" in capsys.readouterr().err

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "run.cfg"
        path.write_text("family = drag\nT_ns = 15\nalpha = 1\n")
        assert main(["predict", "--config", str(path)]) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["config"]["family"] == "drag"

    def test_unknown_key_in_config_file(self, tmp_path, capsys):
        path = tmp_path / "run.cfg"
        path.write_text("colour = red\n")
        assert main(["predict", "--config", str(path)]) == EXIT_CONFIG
        assert "colour" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert main(["predict", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


class TestPulse:
    def test_drag_quadrature(self, capsys):
        assert main(["pulse", "--family", "drag", "--T", "10", "--samples", "101"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("# config-hash: ")
        assert "# pulse: drag, T_ns=10.0" in out

        table = _pulse_table(out)
        assert table.shape == (101, 4)
        t = table[:, 0]
        derivative = (2 * math.pi / 10) * (math.pi / 10) * np.sin(2 * math.pi * t / 10)
        np.testing.assert_allclose(table[:, 2], -derivative / DEFAULT_DELTA2, atol=1e-12)

    def test_r2d_endpoints(self, capsys):
        assert main(["pulse", "--family", "r2d", "--T", "9"]) == EXIT_OK
        table = _pulse_table(capsys.readouterr().out)
        np.testing.assert_allclose(table[[0, -1], 1:], 0.0, atol=1e-9)
        assert table[:, 1].max() > 0

    def test_below_minimum_gate_time(self, capsys):
        assert main(["pulse", "--family", "r2d", "--T", "4.0"]) == EXIT_INFEASIBLE
        assert "T_min" in capsys.readouterr().err

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "pulse.csv"
        assert main(["pulse", "--family", "hann", "--T", "10", "-o", str(path)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert path.read_text().startswith("# config-hash: ")


class TestSimulate:
    def test_idle_gate(self, capsys):
        assert main(["simulate", "--family", "hann", "--theta", "0", "--T", "10"]) == EXIT_OK
        (result,) = json.loads(capsys.readouterr().out)["results"]
        assert result["fidelity"] == pytest.approx(1 / 3, abs=1e-9)
        assert result["dissipative"] is False

    def test_trajectory(self, tmp_path, capsys):
        path = tmp_path / "populations.csv"
        argv = ["simulate", "--family", "drag", "--T", "10", "--levels", "3", "--trajectory", str(path)]
        assert main(argv + ["--stride", "8"]) == EXIT_OK
        (result,) = json.loads(capsys.readouterr().out)["results"]
        assert result["fidelity"] > 0.99

        lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
        assert lines[0] == "t_ns,p0,p1,p2"
        last = [float(value) for value in lines[-1].split(",")]
        assert last[0] == pytest.approx(10.0)
        assert last[2] > 0.99


def test_predict_drag(capsys):
    assert main(["predict", "--family", "drag", "--T", "15", "--alpha", "1"]) == EXIT_OK
    (result,) = json.loads(capsys.readouterr().out)["results"]
    assert result["T_ns"] == 15.0
    assert result["alpha"] == 1.0
    assert result["delta_c_rad_per_ns"] == pytest.approx(0.0442, abs=5e-4)
    assert result["beta"] == pytest.approx(0.98, abs=0.01)


def test_sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    argv = ["sweep", "--family", "r1d", "--T", "4,8", "--levels", "3", "--jobs", "1", "-o", str(path)]
    assert main(argv) == EXIT_OK
    lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
    assert lines[0] == "T_ns,infidelity,beta,alpha12,alpha02,alpha13,delta_c"
    assert lines[1].split(",")[1] == "nan"
    assert float(lines[2].split(",")[1]) < 1e-2


def test_sweep_logs_progress(tmp_path, caplog):
    argv = ["sweep", "--family", "drag", "--T", "8,10", "--levels", "3", "--jobs", "1", "-o", str(tmp_path / "s.csv")]
    with caplog.at_level(logging.INFO, logger="recursive_drag"):
        assert main(argv + ["-v"]) == EXIT_OK
    progress = [record.getMessage() for record in caplog.records if record.name == "recursive_drag.cli"]
    assert progress[0].startswith("Drag [1/2] T = 8.000 ns: infidelity ")
    assert progress[1].startswith("Drag [2/2] T = 10.000 ns: infidelity ")
