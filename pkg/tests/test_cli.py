import csv
import json
import shutil
import subprocess
import sys

import pytest

from qdx import cli
from qdx.errors import ConfigError, SchemaError
from qdx.io import read_manifest, read_table


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_evolve_run(tmp_path):
    cfg = {"task": "evolve", "potential": {"kind": "free"}, "time_grid": [1, 5, 10],
           "radius": 60, "output_dir": "out"}
    path = write_config(tmp_path, cfg)
    assert cli.main(["run", str(path)]) == 0
    doc = read_manifest(tmp_path / "out" / "manifest.json")
    names = [f["path"] for f in doc["files"]]
    assert names == ["wavepacket_000.csv", "wavepacket_001.csv", "wavepacket_002.csv"]
    data = read_table(tmp_path / "out" / "wavepacket_001.csv", "wavepacket")
    # the packet window is narrower than the radius at t = 5
    assert 0 < len(data) <= 121 and max(abs(r["n"]) for r in data) <= 60
    assert abs(sum(r["prob"] for r in data) - 1) < 1e-10
    assert doc["config"]["tol"] == 1e-12
    big = read_table(tmp_path / "out" / "wavepacket_002.csv", "wavepacket")
    assert doc["files"][2]["rows"] == len(big) == 121
    assert len(doc["files"][0]["sha256"]) == 64


def test_tracemap_run(tmp_path):
    cfg = {"task": "tracemap", "potential": {"kind": "fibonacci", "lam": 8.0}, "k_values": [2, 3],
           "output_dir": "tm"}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == 0
    b = read_table(tmp_path / "tm" / "bands_k02.csv", "bands")
    assert len(b) == 2 and [r["m"] for r in b] == [1, 1]
    h = read_table(tmp_path / "tm" / "c_histogram.csv", "c_histogram")
    assert [(r["k"], r["m"], r["count"]) for r in h] == [(2, 1, 2), (3, 1, 2), (3, 2, 1)]


def test_bounds_run_and_plotdata(tmp_path):
    cfg = {"task": "bounds", "potential": {"kind": "fibonacci", "lam": 8.0},
           "p_list": [1, 2], "output_dir": "b"}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == 0
    c = read_table(tmp_path / "b" / "constants.csv", "constants")
    assert c[0]["S_l"] == 3.0 and c[0]["S_u"] == 38.0
    assert cli.main(["plotdata", str(tmp_path / "b" / "manifest.json")]) == 0
    plot = (tmp_path / "b" / "plotdata" / "trend.loglambda_alphaupperlog.txt").read_text().splitlines()
    assert plot[0] == "# log_lambda alpha_upper_log"
    assert len(plot) == 5


def test_exponents_run(tmp_path):
    cfg = {"task": "exponents", "potential": {"kind": "free"}, "time_grid": [2, 5, 10, 20, 50, 100, 200],
           "p_list": [2], "alphas": [0.5, 1.0], "output_dir": "e"}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == 0
    ex = read_table(tmp_path / "e" / "exponents.csv", "exponents")
    assert abs(ex[0]["beta_plus"] - 1) < 0.05
    rep = json.loads((tmp_path / "e" / "report.json").read_text())
    assert rep["windows"]["transport_final"] == [2.0, 200.0]


@pytest.mark.parametrize("cfg,field", [
    ({"task": "evolve", "time_grid": []}, "time_grid"),
    ({"task": "evolve", "time_grid": [2, 1]}, "time_grid"),
    ({"task": "evolve", "time_grid": [1], "tol": 1e-3}, "tol"),
    ({"task": "evolve", "time_grid": [1], "bogus": 1}, "bogus"),
    ({"task": "nope"}, "task"),
    ({"task": "tracemap", "potential": {"kind": "fibonacci", "lam": 4.0}, "k_values": [2]}, "delta"),
    ({"task": "tracemap", "potential": {"kind": "free"}, "k_values": [2]}, "potential"),
    ({"task": "sandwich", "potential": {"kind": "fibonacci", "lam": 5.0},
      "time_grid": [10, 1000]}, "upper"),
    ({"task": "exponents", "time_grid": [10, 100]}, "time_grid"),
    ({"task": "bounds", "potential": {"kind": "fibonacci", "lam": 8.0},
      "envelope": {"time_grid": [10, 100], "side": "up"}}, "envelope.side"),
])
def test_validation_errors(cfg, field):
    with pytest.raises(ConfigError) as exc:
        cli.validate_config(cfg)
    assert exc.value.field == field


def test_validate_command_exit_codes(tmp_path, capsys):
    good = write_config(tmp_path, {"task": "evolve", "time_grid": [1]}, "good.json")
    bad = write_config(tmp_path, {"task": "evolve", "time_grid": []}, "bad.json")
    assert cli.main(["validate", str(good)]) == 0
    assert cli.main(["validate", str(bad)]) == 2
    assert "time_grid: must not be empty" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{not json")
    assert cli.main(["validate", str(tmp_path / "broken.json")]) == 2
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2


def test_computation_error_exit_code(tmp_path, capsys):
    cfg = {"task": "evolve", "time_grid": [50], "window_cap": 10}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == 3
    assert "computation failed" in capsys.readouterr().err


def test_worker_override(tmp_path, monkeypatch):
    cfg = cli.validate_config({"task": "evolve", "time_grid": [1], "workers": 3})
    assert cli.worker_count(cfg) == 3
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    assert cli.worker_count(cfg) == 2
    path = write_config(tmp_path, {"task": "evolve", "time_grid": [1, 2], "output_dir": "w"})
    assert cli.main(["run", str(path)]) == 0
    monkeypatch.setenv(cli.WORKERS_ENV, "x")
    assert cli.main(["validate", str(path)]) == 2


def test_plotdata_empty_table(tmp_path):
    cfg = {"task": "tracemap", "potential": {"kind": "fibonacci", "lam": 8.0}, "k_values": [1],
           "output_dir": "o"}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == 0
    written = cli.emit_plotdata(tmp_path / "o" / "manifest.json")
    empty = [p for p in written if "c_histogram" in p.name]
    assert empty == []          # histograms have no plot projection
    m = tmp_path / "o" / "manifest.json"
    doc = json.loads(m.read_text())
    doc["files"].append({"path": "s.csv", "schema": "spreading"})
    (tmp_path / "o" / "s.csv").write_text("alpha,S_minus,S_plus\n")
    m.write_text(json.dumps(doc))
    written = cli.emit_plotdata(m)
    text = [p for p in written if p.name == "s.alpha_Splus.txt"][0].read_text()
    assert text == "# alpha S_plus\n"


def test_plotdata_missing_column(tmp_path, capsys):
    cfg = {"task": "tracemap", "potential": {"kind": "fibonacci", "lam": 8.0}, "k_values": [2],
           "output_dir": "o"}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == 0
    f = tmp_path / "o" / "bands_k02.csv"
    f.write_text(f.read_text().replace("width", "wdth"))
    with pytest.raises(SchemaError, match="missing column 'width'"):
        cli.emit_plotdata(tmp_path / "o" / "manifest.json")
    assert cli.main(["plotdata", str(tmp_path / "o" / "manifest.json")]) == 2


def test_precision_option(tmp_path):
    cfg = {"task": "evolve", "time_grid": [1], "radius": 2, "precision": 4, "output_dir": "p"}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == 0
    r = rows(tmp_path / "p" / "wavepacket_000.csv")
    # n = -2 at t = 1: J_2(2)^2
    assert r[1][0] == "-2" and r[1][3] == "0.1245"


def test_console_script(tmp_path):
    exe = shutil.which("qdx")
    cmd = [exe] if exe else [sys.executable, "-m", "qdx.cli"]
    path = write_config(tmp_path, {"task": "evolve", "time_grid": []})
    proc = subprocess.run(cmd + ["validate", str(path)], capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run(cmd + ["bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
