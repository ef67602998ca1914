import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from benthic_patterns.cli import OUT_ENV, main, parse_range, read_config
from benthic_patterns.pde import Domain, Field, write_field


def run(args, tmp_path, name):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, out


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_parse_range():
    r = parse_range("0:0.25:200")
    assert (r.lo, r.hi, r.n) == (0.0, 0.25, 200)
    assert str(r) == "0.0:0.25:200"
    for bad in ("0:1", "a:b:c", "1:0:5", "0:1:0"):
        with pytest.raises(Exception):
            parse_range(bad)


def test_scan_single_cell(tmp_path):
    code, out = run(["scan", "--sigma", "0.1:0.11:1", "--gamma", "0.25:0.26:1"], tmp_path, "s")
    assert code == 0
    r = rows(out / "scan.csv")
    assert r[0] == ["sigma", "gamma", "root_index", "u", "v", "class"]
    # one cell, one row per root
    assert len(r) == 4
    assert all(float(x[0]) == pytest.approx(0.105) and float(x[1]) == pytest.approx(0.255) for x in r[1:])


def test_scan_rerun_from_echo_is_byte_identical(tmp_path):
    code, a = run(["scan", "--sigma", "0:0.25:6", "--gamma", "0:0.6:5", "--m", "0.32"], tmp_path, "a")
    assert code == 0
    code, b = run(["scan", "--config", str(a / "config.txt")], tmp_path, "b")
    assert code == 0
    for name in ("scan.csv", "config.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert "m = 0.32" in (a / "config.txt").read_text()


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("# comment\ngamma = 0.3\nsigma = 0.05\n")
    code, out = run(["homog", "--config", str(cfg), "--sigma", "0.1"], tmp_path, "h")
    assert code == 0
    conf = read_config(out / "config.txt")
    assert conf["gamma"] == "0.3" and conf["sigma"] == "0.1"


@pytest.mark.parametrize("text", ["bogus = 1\n", "gamma\n", "gamma = 1\ngamma = 2\n", "command = scan\n"])
def test_bad_config_is_usage_error(tmp_path, text, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text(text)
    code, _ = run(["homog", "--config", str(cfg)], tmp_path, "h")
    assert code == 2
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("args", [["scan", "--sigma", "0:1"], ["nope"], ["homog", "--gamma", "-1"],
                                  ["disp", "--index", "7"], ["cont", "--start", "missing.dat"]])
def test_usage_errors(tmp_path, args):
    code, _ = run(args, tmp_path, "x")
    assert code == 2


def test_numeric_failure_exit_code(tmp_path, capsys):
    d = Domain(((0, 50),), (21,))
    x = d.coords()[0]
    start = tmp_path / "w.dat"
    start.write_text(write_field(Field(d, 40 + 30 * np.cos(x), np.full(21, 1e-3), sigma=0.1)))
    # an unreachable tolerance makes the start-up Newton solve fail
    code, _ = run(["cont", "--start", str(start), "--steps", "2", "--tol", "1e-300"], tmp_path, "c")
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_stripe_start_without_stripes_is_usage_error(tmp_path):
    # c3 < 0 here, so no stripes exist above onset
    code, _ = run(["cont", "--gamma", "0.3", "--start", "stripe", "--offset", "0.002"], tmp_path, "c")
    assert code == 2


def test_homog_and_disp(tmp_path):
    code, out = run(["homog", "--gamma", "0.25", "--sigma", "0.1"], tmp_path, "h")
    assert code == 0
    r = rows(out / "homogeneous.csv")
    assert r[1][5] == "TuringUnstable" and float(r[1][1]) == pytest.approx(1.0)
    code, out = run(["disp", "--gamma", "0.25", "--sigma", "0.1", "--k-range", "0:0.4:5"], tmp_path, "d")
    assert code == 0
    r = rows(out / "dispersion.csv")
    assert r[0] == ["k", "mu_plus_re", "mu_plus_im", "mu_minus_re", "mu_minus_im"] and len(r) == 6
    assert float(r[3][1]) > 0  # k = 0.2 lies in the Turing band


def test_landau_sweep(tmp_path):
    code, out = run(["landau", "--gamma", "0.2:0.25:2"], tmp_path, "l")
    assert code == 0
    r = rows(out / "landau.csv")
    assert r[0] == ["gamma", "sigma_c", "k_c", "c1", "c2", "c3", "c4", "c_f"]
    assert float(r[1][5]) > 0 > float(r[2][5])


def test_landau_marks_missing_rows(tmp_path):
    code, out = run(["landau", "--gamma", "0.9:0.95:2"], tmp_path, "l")
    assert code == 0
    r = rows(out / "landau.csv")
    assert all(x[1] == "NA" for x in r[1:])


def test_cont_switch_and_restart(tmp_path):
    base = ["cont", "--gamma", "0.3", "--sigma", "0.115", "--half-periods", "2", "--steps", "12",
            "--switch", "1", "--switch-steps", "15", "--snapshot-every", "5"]
    code, out = run(base, tmp_path, "c")
    assert code == 0
    hom = rows(out / "branch.csv")
    assert "bifurcation" in {x[9] for x in hom[1:]}
    sw = rows(out / "branch_switch1.csv")
    assert len(sw) > 5
    snap = out / "snapshots" / "branch_switch1_00005.dat"
    assert snap.exists()
    code, again = run(["cont", "--gamma", "0.3", "--start", str(snap), "--steps", "5",
                       "--label", "branch_switch1"], tmp_path, "r")
    assert code == 0
    new = rows(again / "branch_switch1.csv")
    for r_new in new[1:]:
        ref = sw[1 + 5 + int(r_new[0])]
        for a, b in zip(r_new[1:8], ref[1:8]):
            assert abs(float(a) - float(b)) < 1e-10


def test_ti_outputs(tmp_path):
    code, out = run(["ti", "--gamma", "0.25", "--sigma", "0.14", "--lx", "60", "--ly", "64", "--nx", "21",
                     "--ny", "22", "--T", "20", "--dt", "0.5", "--snapshots", "0,10", "--window", "5",
                     "--strip-height", "32", "--seed", "4"], tmp_path, "t")
    assert code == 0
    names = set(os.listdir(out))
    assert {"config.txt", "final.dat", "trajectory.csv", "layering.csv", "snapshot_t0.dat", "snapshot_t10.dat"} <= names
    assert rows(out / "layering.csv")[0] == ["strip_index", "y_center", "label"]
    code, b = run(["ti", "--config", str(out / "config.txt")], tmp_path, "t2")
    assert code == 0
    assert (out / "final.dat").read_bytes() == (b / "final.dat").read_bytes()


def test_ti_zero_perturbation_is_constant(tmp_path):
    code, out = run(["ti", "--sigma", "0.1", "--u-init", "1.0", "--v-init", "1.0", "--amplitude", "0",
                     "--dim", "1", "--lx", "50", "--nx", "11", "--T", "10", "--window", "5"], tmp_path, "t")
    assert code == 0
    lines = [l for l in (out / "final.dat").read_text().splitlines() if not l.startswith("#")]
    for l in lines:
        x, u, v = map(float, l.split())
        assert u == pytest.approx(1.0, abs=1e-12) and v == pytest.approx(1.0, abs=1e-12)


def test_ti_sigma_profile(tmp_path):
    code, out = run(["ti", "--sigma-profile", "0.128,0.011,480", "--lx", "30", "--ly", "100", "--nx", "7",
                     "--ny", "11", "--T", "1", "--strip-height", "50"], tmp_path, "t")
    assert code == 0
    assert "sigma_profile = 0.128,0.011,480.0" in (out / "config.txt").read_text()
    code, _ = run(["ti", "--sigma-profile", "0.1,2"], tmp_path, "bad")
    assert code == 2


def test_norms_and_export(tmp_path):
    code, t = run(["ti", "--dim", "1", "--lx", "20", "--nx", "6", "--T", "1"], tmp_path, "t")
    code, out = run(["norms", "--field", str(t / "final.dat")], tmp_path, "n")
    assert code == 0
    r = rows(out / "norms.csv")
    assert r[0] == ["field", "u_l1", "u_l2", "u_l8", "v_l1", "v_l2", "v_l8"] and len(r) == 2
    code, out = run(["export", "--what", "field", "--field", str(t / "final.dat")], tmp_path, "e")
    assert code == 0 and rows(out / "field.csv")[0] == ["x", "u", "v"]
    code, out = run(["export", "--what", "neutral", "--gamma", "0.25", "--sigma-range", "0.1:0.14:5"],
                    tmp_path, "e2")
    assert code == 0
    r = rows(out / "neutral.csv")
    assert r[0] == ["sigma", "k_minus", "k_plus"]
    assert r[1][1] != "NA" and r[-1][1] == "NA"
    code, out = run(["export", "--what", "critical", "--gamma-range", "0.3:0.3:1"], tmp_path, "e3")
    r = rows(out / "critical.csv")
    assert len(r) == 3 and float(r[1][1]) > float(r[2][1])
    code, _ = run(["norms"], tmp_path, "n2")
    assert code == 2


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "root"))
    assert main(["homog"]) == 0
    assert (tmp_path / "root" / "homog" / "homogeneous.csv").exists()


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "benthic_patterns", "homog", "--out", str(tmp_path / "m")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    res = subprocess.run([sys.executable, "-m", "benthic_patterns", "scan", "--sigma", "x"],
                         capture_output=True, text=True)
    assert res.returncode == 2
