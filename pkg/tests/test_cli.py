import json
import math
import os
import subprocess
import sys

import pytest

from jetgeom.cli import main, parse_grid

LINEAR = ["--sigma.kind=linear", "--sigma.coeffs=1,0,0,0"]
FLAT = ["--sigma.kind=constant", "--sigma.coeffs=0"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_x1(capsys):
    code, out, _ = run(capsys, "eval", *LINEAR, "--h.kind=constant", "--h.params=1",
                       "--t=1", "--x=0,0,0,0", "--y=1,1,1,1")
    d = json.loads(out)
    assert code == 0
    assert set(d) == {"point", "F", "g", "ginv", "M", "N", "L", "frakR", "torsion", "ricci",
                      "scalarR", "einstein", "stress_energy", "em2form"}
    assert d["scalarR"] == pytest.approx(8.0)
    assert d["N"]["1"]["1"] == 4.0
    assert d["frakR"]["2"]["1"]["1"]["2"] == pytest.approx(2 / 3)
    assert d["einstein"]["block_tt"] == pytest.approx(-4.0)
    assert d["stress_energy"]["T11_up"] == pytest.approx(-4.0)
    assert d["F"] == pytest.approx(math.sqrt(6))


def test_eval_domain_error(capsys):
    code, out, err = run(capsys, "eval", *LINEAR, "--y=1,-1,0,0")
    assert code == 3 and out == "" and "G11 <= 0" in err


def test_eval_flat_is_all_zero(capsys):
    code, out, _ = run(capsys, "eval", *FLAT)
    d = json.loads(out)

    def leaves(v):
        if isinstance(v, dict):
            for w in v.values():
                yield from leaves(w)
        else:
            yield v

    assert code == 0
    for key in ("M", "N", "L", "frakR", "torsion", "ricci", "em2form"):
        assert all(v == 0.0 for v in leaves(d[key])), key
    assert d["scalarR"] == 0.0


def test_eval_zero_K_is_config_error(capsys):
    code, _, err = run(capsys, "eval", *LINEAR, "--K=0")
    assert code == 2 and "non-zero" in err


def test_validate_constant(capsys):
    code, out, _ = run(capsys, "validate", "--sigma.kind=constant", "--sigma.coeffs=1",
                       "--samples=10")
    d = json.loads(out)
    assert code == 0 and d["passed"]
    assert all(o["max_abs"] == 0.0 for k, o in d["objects"].items() if k not in ("g", "ginv"))


def test_validate_forced_failure(capsys):
    code, out, _ = run(capsys, "validate", *LINEAR, "--samples=3", "--tolerance=1e-18")
    assert code == 1 and json.loads(out)["passed"] is False


@pytest.mark.parametrize("argv", [
    ["validate", "--sigma.kind=linear"],
    ["validate", *LINEAR, "--samples=0"],
    ["validate", *LINEAR, "--tolerance=-1"],
    ["validate", *LINEAR, "--seed=abc"],
    ["eval", *LINEAR, "--x=1,2"],
    ["eval", "--sigma.kind=quadratic", "--sigma.coeffs=" + ",".join(["1"] * 15)],
    ["eval", *LINEAR, "--config=/nonexistent/cfg"],
])
def test_config_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("error:")


def test_validate_writes_report(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "validate", *LINEAR, "--samples=3", "--seed=7", f"--json={path}")
    assert code == 0 and out.strip() == str(path)
    assert json.loads(path.read_text())["seed"] == 7
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "field.cfg"
    cfg.write_text("# sigma = x^1\nsigma.kind=linear\nsigma.coeffs=1,0,0,0\n"
                   "h.kind=power h.params=2\nt=2\n")
    code, out, _ = run(capsys, "eval", f"--config={cfg}", "--y=1,0.5,0.5,0.5")
    d = json.loads(out)
    assert code == 0 and d["point"]["t"] == 2.0
    assert d["M"]["1"] == pytest.approx(-0.5)
    code, out, _ = run(capsys, "eval", f"--config={cfg}", "--sigma.coeffs=0,0,0,0")
    assert json.loads(out)["scalarR"] == 0.0


def test_config_file_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sigma.kind=linear\nsigma.coeffs=1,0,0,0\nspeed=3\n")
    code, _, err = run(capsys, "eval", f"--config={cfg}")
    assert code == 2 and "line 3" in err and "speed" in err


def test_scan_two_points(capsys):
    code, out, _ = run(capsys, "scan", *LINEAR, "--grid=x1=0:1:2")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "x1,x2,x3,x4,scalarR,ricci_trace,ricci_eig_min,ricci_eig_max"
    assert len(lines) == 3
    R = [float(line.split(",")[4]) for line in lines[1:]]
    assert R[0] == pytest.approx(8.0, rel=1e-11)
    assert R[1] == pytest.approx(8 * math.exp(-2), rel=1e-11)


def test_scan_grid_counts_and_flat(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, out, _ = run(capsys, "scan", *FLAT, "--grid=x1=0:1:3", "--grid=x3=-1:1:3",
                       f"--csv={path}")
    rows = path.read_text().splitlines()[1:]
    assert code == 0 and out.strip() == str(path)
    assert len(rows) == 9
    assert all(float(r.split(",")[4]) == 0.0 for r in rows)


@pytest.mark.parametrize("spec", ["x1=0:1", "x9=0:1:2", "x1=0:1:0", "y1=0:1:2", "x1=a:1:2"])
def test_scan_malformed_grid(capsys, spec):
    code, _, err = run(capsys, "scan", *LINEAR, f"--grid={spec}")
    assert code == 2 and "grid" in err


def test_parse_grid_repeated_axis():
    with pytest.raises(Exception, match="twice"):
        parse_grid(["x1=0:1:2", "x1=0:2:2"])


def test_extremal_flat_line(capsys):
    code, out, _ = run(capsys, "extremal", *FLAT, "--h.kind=constant", "--h.params=1",
                       "--t=0", "--t-end=1", "--steps=100", "--y=1,1,1,1")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "t,x1,x2,x3,x4,y1,y2,y3,y4"
    assert len(lines) == 1 + 101 + 1
    last = [float(v) for v in lines[-2].split(",")]
    assert last[:5] == pytest.approx([1, 1, 1, 1, 1], abs=1e-10)
    summary = dict(kv.split("=") for kv in lines[-1].lstrip("# ").split(","))
    assert float(summary["el_residual_max"]) < 1e-10


def test_extremal_domain_exit(capsys):
    code, out, err = run(capsys, "extremal", *LINEAR, "--y=1,-1,0,0")
    assert code == 3 and out == "" and "G11 <= 0" in err
    code, _, err = run(capsys, "extremal", *FLAT, "--h.kind=power", "--h.params=2", "--t=1",
                       "--t-end=-1", "--steps=10")
    assert code == 3 and "last valid t" in err


def test_extremal_too_few_steps(capsys):
    code, _, _ = run(capsys, "extremal", *FLAT, "--steps=3")
    assert code == 2


def test_diag(capsys, tmp_path):
    code, out, _ = run(capsys, "diag")
    d = json.loads(out)
    assert code == 0 and d["deviation"] <= 1e-12 and d["signature"] == [1.0, -1.0, -1.0, -1.0]
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "diag", f"--json={path}")
    assert code == 0 and out.strip() == str(path) and json.loads(path.read_text())["passed"]
    code, _, _ = run(capsys, "diag", "--tolerance=1e-20")
    assert code == 1


def test_deterministic_output(capsys):
    outs = [run(capsys, "scan", *LINEAR, "--grid=x1=-1:1:4", "--grid=x2=0:1:2")[1]
            for _ in range(2)]
    assert outs[0] == outs[1]


def test_failed_write_leaves_no_partial_file(capsys, tmp_path):
    target = tmp_path / "missing-dir" / "out.json"
    code, _, err = run(capsys, "diag", f"--json={target}")
    assert code == 2 and "cannot write" in err
    assert not target.exists()
    assert not os.listdir(tmp_path)


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "jetgeom", "diag"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["passed"]
    r = subprocess.run([sys.executable, "-m", "jetgeom"], capture_output=True, text=True)
    assert r.returncode == 2


def test_dash_path_means_stdout(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "eval", *LINEAR, "--json=-")
    assert code == 0
    assert json.loads(out)["point"]["t"] == 1.0
    assert not (tmp_path / "-").exists()
