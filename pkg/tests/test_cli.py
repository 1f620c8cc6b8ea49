import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from meshkit.cli import main
from meshkit import io as mio


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "meshkit.cli"] + args,
                          capture_output=True, text=True, env=env)


def test_exact_example1_artifacts(tmp_path):
    out = tmp_path / "run"
    code = main(["exact", "--preset", "example1", "--n", "60",
                 "--out", str(out)])
    assert code == 0
    for name in ("mesh.csv", "ellipses.csv", "residual.csv", "report.json",
                 "mesh.svg"):
        assert (out / name).exists()
    report = json.loads((out / "report.json").read_text())
    assert report["mode"] == "exact"
    assert report["qs"]["feature"] == pytest.approx(8.529, abs=0.01)
    assert report["qs"]["background"] == pytest.approx(1.667, abs=0.005)
    assert report["qa"]["max"] == pytest.approx(1.0, abs=1e-10)

    # mesh file shape: (n+1)^2 rows + header, seam duplicated
    lines = (out / "mesh.csv").read_text().split("\n")
    assert lines[0] == "i,j,xi,eta,x,y"
    assert len([ln for ln in lines[1:] if ln]) == 61 * 61


def test_mesh_csv_identity_roundtrip(tmp_path):
    mesh = np.stack(np.meshgrid(np.arange(8) / 8, np.arange(8) / 8,
                                indexing="ij"), axis=-1)
    path = tmp_path / "mesh.csv"
    mio.export_mesh(mesh, str(path))
    rows = [ln for ln in path.read_text().split("\n")[1:] if ln]
    assert len(rows) == 81
    for row in rows:
        _, _, xi, eta, x, y = row.split(",")
        assert float(x) == pytest.approx(float(xi), abs=1e-15)
        assert float(y) == pytest.approx(float(eta), abs=1e-15)
    back = mio.read_mesh(str(path))
    assert np.abs(back - mesh).max() <= 1e-15


def test_report_json_roundtrip(tmp_path):
    report = {"theta": 3.0000000001234567, "n": 60, "mode": "pma",
              "qs": {"feature": 8.5, "background": 1.6,
                     "probes": [1.0, 2.0]},
              "qa": {"min": 1.0, "max": 1.001},
              "residual": {"max": 0.01, "cv": 0.004},
              "steps": 1234, "converged": True}
    path = tmp_path / "report.json"
    mio.export_report(report, str(path))
    text = path.read_text()
    assert "\r" not in text
    assert json.loads(text) == report


def test_svg_identity_mesh(tmp_path):
    mesh = np.stack(np.meshgrid(np.arange(4) / 4, np.arange(4) / 4,
                                indexing="ij"), axis=-1)
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    mio.render_svg(mesh, [], str(p1))
    mio.render_svg(mesh, [], str(p2))
    text = p1.read_text()
    assert text.count("<polyline") == 8
    assert "<ellipse" not in text
    assert text == p2.read_text()


def test_svg_example1_feature_angle(tmp_path):
    out = tmp_path / "run"
    assert main(["exact", "--preset", "example1", "--n", "32",
                 "--out", str(out), "--emit", "ellipses,svg"]) == 0
    rows = [ln.split(",") for ln
            in (out / "ellipses.csv").read_text().split("\n")[1:] if ln]
    ratios = np.array([float(r[4]) / float(r[5]) for r in rows])
    angles = np.array([float(r[6]) for r in rows])
    worst = int(np.argmax(ratios))
    assert abs(math.degrees(angles[worst]) - (-45.0)) <= 2.0


def test_config_file_and_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"preset": "example1", "n": 32,
                               "emit": ["report"]}))
    out = tmp_path / "o"
    assert main(["exact", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["n"] == 32
    assert not (out / "mesh.csv").exists()

    cfg.write_text(json.dumps({"preset": "example1", "bogus": 1}))
    assert main(["exact", "--config", str(cfg), "--out", str(out)]) == 1


def test_flag_overrides_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"preset": "example1", "n": 32,
                               "emit": ["report"]}))
    out = tmp_path / "o"
    assert main(["exact", "--config", str(cfg), "--n", "16",
                 "--out", str(out)]) == 0
    assert json.loads((out / "report.json").read_text())["n"] == 16


def test_errors_exit_codes(tmp_path):
    # no density at all
    assert main(["exact", "--out", str(tmp_path)]) == 1
    # example3 has no separable exact solution
    assert main(["exact", "--preset", "example3",
                 "--out", str(tmp_path)]) == 1
    # not converged -> 2, artifacts still written
    out = tmp_path / "nc"
    assert main(["pma", "--preset", "example1", "--n", "32",
                 "--max-steps", "3", "--emit", "report",
                 "--out", str(out)]) == 2
    assert json.loads((out / "report.json").read_text())["converged"] is False


def test_cli_entrypoint_and_env_out(tmp_path):
    res = run_cli(["pma", "--preset", "example1", "--n", "32",
                   "--emit", "report"],
                  env_extra={"MESHKIT_OUT": str(tmp_path)})
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "report.json").exists()


def test_cli_error_single_line(tmp_path):
    res = run_cli(["exact", "--preset", "example3", "--out", str(tmp_path)])
    assert res.returncode == 1
    err = [ln for ln in res.stderr.strip().split("\n") if ln]
    assert len(err) == 1 and err[0].startswith("meshkit:")


def test_analyze_reproduces_exact_report(tmp_path):
    out = tmp_path / "x"
    assert main(["exact", "--preset", "example1", "--n", "60",
                 "--out", str(out)]) == 0
    base = json.loads((out / "report.json").read_text())
    out2 = tmp_path / "a"
    assert main(["analyze", "--preset", "example1",
                 "--mesh", str(out / "mesh.csv"),
                 "--emit", "report", "--out", str(out2)]) == 0
    again = json.loads((out2 / "report.json").read_text())
    assert again["mode"] == "analyze"
    assert again["theta"] == pytest.approx(base["theta"], rel=1e-12)
    for key in ("feature", "background"):
        assert again["qs"][key] == pytest.approx(base["qs"][key], rel=2e-2)
