import json
import math

import numpy as np
import pytest

from spherical_gradient import cli
from spherical_gradient.io import read_points, write_json


def _model(path, components, delta=1e-6):
    write_json({"type": "components", "delta": delta,
                "components": [{"z": z, "k": k, "theta": t} for z, k, t in components]}, path)
    return str(path)


@pytest.fixture
def linear_model(tmp_path):
    return _model(tmp_path / "linear.json", [([0, 0, 1], 1, 0.5)])


@pytest.fixture
def null_model(tmp_path):
    return _model(tmp_path / "null.json", [])


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_sample_is_byte_identical(tmp_path, linear_model):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("sample", linear_model, "-n", 50, "--seed", 4, "-o", a, "--threads", 1) == 0
    assert run("sample", linear_model, "-n", 50, "--seed", 4, "-o", b, "--threads", 2) == 0
    assert a.read_bytes() == b.read_bytes()
    pts, fmt = read_points(a)
    assert fmt == "xyz" and pts.shape == (50, 3)


def test_sample_zero_rows_and_lonlat(tmp_path, linear_model):
    out = tmp_path / "empty.csv"
    assert run("sample", linear_model, "-n", 0, "-o", out) == 0
    assert out.read_text() == "x,y,z\n"
    ll = tmp_path / "ll.csv"
    assert run("sample", linear_model, "-n", 5, "--format", "lonlat", "-o", ll, "--threads", 1) == 0
    assert ll.read_text().splitlines()[0] == "lon_deg,lat_deg"
    assert read_points(ll)[0].shape == (5, 3)


def test_sample_solver_failure_exits_4(tmp_path, linear_model, capsys):
    code = run("sample", linear_model, "-n", 3, "--tol", 1e-30, "--max-iter", 1, "--threads", 1,
               "-o", tmp_path / "x.csv")
    assert code == 4
    assert "sample 0" in capsys.readouterr().err


def test_fit_round_trip(tmp_path, linear_model):
    data = tmp_path / "data.csv"
    assert run("sample", linear_model, "-n", 2000, "--seed", 1, "-o", data) == 0
    rep = tmp_path / "fit.json"
    assert run("fit", data, linear_model, "-o", rep) == 0
    fit = json.loads(rep.read_text())
    assert abs(fit["theta_hat"][0] - 0.5) <= 0.05
    assert fit["converged"] and fit["n_data"] == 2000 and fit["dim"] == 1


def test_fit_not_converged_exits_3(tmp_path, linear_model):
    data = tmp_path / "data.csv"
    run("sample", linear_model, "-n", 200, "--seed", 2, "-o", data, "--threads", 1)
    quad = tmp_path / "quad.json"
    write_json({"type": "quadratic", "mu": [0, 0, 0], "A": np.zeros((3, 3)).tolist()}, quad)
    assert run("fit", data, quad, "--max-iter", 1, "-o", tmp_path / "f.json") == 3


def test_fit_input_errors_exit_2(tmp_path, linear_model, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("x,y,z\n")
    assert run("fit", empty, linear_model) == 2
    assert "EmptyData" in capsys.readouterr().err
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,z\n1,0,0\n0,one,0\n")
    assert run("fit", bad, linear_model) == 2
    assert "bad.csv:3" in capsys.readouterr().err
    broken = tmp_path / "broken.json"
    broken.write_text("{\n  \"type\": \n")
    assert run("sample", broken, "-n", 1) == 2
    assert run("sample", tmp_path / "missing.json", "-n", 1) == 2


def test_density_grid(tmp_path, null_model):
    out = tmp_path / "g.csv"
    assert run("density-grid", null_model, "--resolution", 6, "-o", out) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "lon_deg,lat_deg,density"
    assert len(rows) == 1 + 12 * 7
    assert all(float(r.split(",")[2]) == 1.0 for r in rows[1:])


def test_density_grid_figure_2a_peaks_opposite_mu(tmp_path):
    quad = tmp_path / "mu.json"
    write_json({"type": "quadratic", "mu": [1.0, 0, 0], "A": np.zeros((3, 3)).tolist()}, quad)
    out = tmp_path / "g.csv"
    assert run("density-grid", quad, "--resolution", 18, "-o", out) == 0
    vals = np.loadtxt(out, delimiter=",", skiprows=1)
    lon, lat, _ = vals[np.argmax(vals[:, 2])]
    x = math.cos(math.radians(lat)) * math.cos(math.radians(lon))
    assert x < -0.99


def test_density_grid_rejects_s3(tmp_path):
    m = tmp_path / "s3.json"
    write_json({"type": "components", "ambient": 4, "components": [{"z": [0, 0, 0, 1], "k": 1, "theta": 0.3}]}, m)
    assert run("density-grid", m) == 2


def test_check_null_passes(tmp_path, null_model):
    out = tmp_path / "c.json"
    assert run("check", null_model, "--points", 10, "--resolution", 500, "-o", out) == 0
    assert json.loads(out.read_text())["passed"]


def test_check_two_specs_jacobian(tmp_path, linear_model):
    other = _model(tmp_path / "other.json", [([1, 0, 0], 3, -0.6), ([0, 1, 0], 2, 0.3)])
    assert run("check", linear_model, other, "--suite", "jacobian", "--points", 50, "-o", tmp_path / "c.json") == 0


def test_check_inadmissible_exits_before_suite(tmp_path, monkeypatch):
    bad = _model(tmp_path / "bad.json", [([0, 0, 1], 1, 0.7), ([1, 0, 0], 2, -0.5)])

    def boom(*a, **k):
        raise AssertionError("suite must not run")
    monkeypatch.setattr(cli, "run_suite", boom)
    assert run("check", bad) == 2


def test_check_violation_exits_5_with_report(tmp_path, null_model, monkeypatch):
    monkeypatch.setattr(cli, "run_suite",
                        lambda *a, **k: {"checks": [{"name": "jacobian", "passed": False}], "passed": False})
    out = tmp_path / "c.json"
    assert run("check", null_model, "-o", out) == 5
    assert json.loads(out.read_text())["passed"] is False


def _report(path, aic, dim, fp="f00"):
    write_json({"aic": aic, "dim": dim, "loglik": -(aic - 2 * dim) / 2, "data_fingerprint": fp}, path)
    return str(path)


def test_aic_ranking(tmp_path, capsys):
    null = _report(tmp_path / "null.json", 0.0, 0)
    quad = _report(tmp_path / "quad.json", -9.0, 8)
    out = tmp_path / "rank.json"
    assert run("aic", null, quad, "-o", out) == 0
    ranking = json.loads(out.read_text())["ranking"]
    assert [r["report"] for r in ranking] == [quad, null]
    assert "quad.json" in capsys.readouterr().out.splitlines()[1]
    assert run("aic", null) == 0


def test_aic_fingerprint_mismatch(tmp_path):
    a = _report(tmp_path / "a.json", 1.0, 1, "aaa")
    b = _report(tmp_path / "b.json", 2.0, 1, "bbb")
    assert run("aic", a, b) == 2
