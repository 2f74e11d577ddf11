import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from cohomolab import lab

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = lab.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_cohomology_table_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "cohomology", "--preset", "Z2", "--rep", "trivial:1", "--out", str(tmp_path))
    assert code == 0
    rows = [ln.split() for ln in out.splitlines() if ln.strip()[:1].isdigit()]
    assert [int(r[2]) for r in rows] == [1, 2, 1]
    payload = json.loads((tmp_path / "cohomology.json").read_text())
    assert [d["dim_H"] for d in payload["degrees"]] == [1, 2, 1]


def test_cohomology_z3_character(capsys):
    code, out, _ = run(capsys, "cohomology", "--preset", "Z3", "--rep", "char:1/3")
    assert code == 0
    payload = json.loads(out[out.index("{"):])
    # H^2 of Z/3 with a nontrivial character is nonzero: Euler characteristic is 1
    assert [d["dim_H"] for d in payload["degrees"]] == [0, 0, 1]


def test_cohomology_from_files(capsys):
    code, out, _ = run(capsys, "cohomology", "--complex", str(DATA / "torus.cx"),
                       "--rep", str(DATA / "sign_character.rep"))
    assert code == 0 and '"dim_H": 0' in out
    code, out, _ = run(capsys, "cohomology", "--complex", str(DATA / "z2.pres"), "--rep", "trivial:1")
    assert code == 0 and "euler audit: ok" in out


def test_exit_codes(capsys):
    code, _, err = run(capsys, "cohomology", "--complex", "/no/such/file.cx")
    assert code == 2 and "/no/such/file.cx" in err
    code, _, err = run(capsys, "cohomology", "--complex", str(DATA / "mismatch.cx"))
    assert code == 2
    code, _, err = run(capsys, "cohomology", "--preset", "Z3", "--rep", "char:1/4")
    assert code == 3 and "relator" in err
    code, _, _ = run(capsys, "sweep", "--preset", "Z2", "--eps", "0.1,0.05")
    assert code == 2
    code, _, _ = run(capsys, "sweep", "--preset", "Z3", "--rep", "char:1/3", "--strategy", "free_arbitrary")
    assert code == 3


def test_sweep_below_sufficient_epsilon(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "Z2", "--rep", "char:1/2,1/2", "--degree", "1",
                       "--eps", "0.01,0.05,0.1", "--trials", "10")
    assert code == 0
    rows = read_csv(out)
    cells = [r for r in rows if r["seed"].isdigit()]
    assert len(cells) == 30
    assert all(r["vanishing_preserved"] == "1" for r in cells)
    summary = [r for r in rows if r["seed"] == "summary"]
    assert [float(r["vanishing_preserved"]) for r in summary] == [1.0, 1.0, 1.0]
    se = [r for r in rows if r["seed"] == "sufficient_epsilon"][0]
    assert float(se["epsilon_requested"]) == pytest.approx(0.15781201303, rel=1e-9)


def test_sweep_counterexample(capsys):
    eps = repr(2 * math.sin(math.pi / 8))
    code, out, _ = run(capsys, "sweep", "--preset", "Z", "--rep", "circle:8", "--eps", eps, "--trials", "3",
                       "--strategy", "circle_mode_flatten")
    assert code == 0
    summary = [r for r in read_csv(out) if r["seed"] == "summary"]
    assert float(summary[0]["vanishing_preserved"]) == 0.0


def test_sweep_single_zero_cell(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "Z2", "--rep", "char:1/2,1/2", "--degree", "1",
                       "--eps", "0", "--trials", "1")
    rows = read_csv(out)
    cells = [r for r in rows if r["seed"].isdigit()]
    assert len(cells) == 1 and float(cells[0]["drift"]) == 0


def test_sweep_summary_recount(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "Z", "--rep", "circle:16", "--eps", "0.1,0.3,0.5",
                       "--trials", "4")
    rows = read_csv(out)
    for s in (r for r in rows if r["seed"] == "summary"):
        sel = [r for r in rows if r["seed"].isdigit() and r["epsilon_requested"] == s["epsilon_requested"]]
        assert float(s["vanishing_preserved"]) == sum(r["vanishing_preserved"] == "1" for r in sel) / len(sel)


def test_sweep_csv_format(tmp_path, capsys):
    run(capsys, "sweep", "--preset", "F2", "--rep", "random:2", "--eps", "0.01,0.1", "--trials", "2",
        "--out", str(tmp_path))
    raw = (tmp_path / "sweep.csv").read_bytes()
    assert b"\r" not in raw
    header = raw.split(b"\n")[0].decode().split(",")
    assert tuple(header) == lab.SWEEP_COLUMNS


def test_sweep_parallel_matches_serial(tmp_path, capsys):
    args = ["sweep", "--preset", "Z2", "--rep", "random:2", "--degree", "1", "--eps", "0.01,0.05",
            "--trials", "4"]
    run(capsys, *args, "--out", str(tmp_path / "a"), "--jobs", "1")
    run(capsys, *args, "--out", str(tmp_path / "b"), "--jobs", "2")
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


def test_config_file_and_flag_precedence(tmp_path, capsys, monkeypatch):
    conf = tmp_path / "run.conf"
    conf.write_text('# sweep settings\npreset = "Z2"\nrep = char:1/2,1/2\ndegree = 1\neps = 0.01\ntrials = 2\n')
    code, out, _ = run(capsys, "sweep", "--config", str(conf))
    assert code == 0
    assert len([r for r in read_csv(out) if r["seed"].isdigit()]) == 2
    code, out, _ = run(capsys, "sweep", "--config", str(conf), "--trials", "3")
    assert len([r for r in read_csv(out) if r["seed"].isdigit()]) == 3
    monkeypatch.setenv("COHOMOLAB_JOBS", "2")
    code, out2, _ = run(capsys, "sweep", "--config", str(conf), "--trials", "3")
    assert out2 == out
    conf.write_text("colour = blue\n")
    code, _, _ = run(capsys, "sweep", "--config", str(conf))
    assert code == 2


def test_scaling(capsys):
    code, out, _ = run(capsys, "scaling", "--N", "4,8,16,64")
    assert code == 0
    rows = read_csv(out)
    assert float(rows[0]["kappa0"]) == pytest.approx(math.sqrt(2), abs=1e-12)
    for r in rows:
        assert abs(float(r["kappa0"]) - float(r["closed_form"])) <= 1e-10
        assert float(r["sufficient_epsilon"]) < float(r["flatten_distance"])
    eps = [float(r["sufficient_epsilon"]) for r in rows]
    assert all(a > b for a, b in zip(eps, eps[1:]))


def test_verify_pass_and_filter(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert [ln.split()[1].rstrip(":") for ln in out.splitlines()] == list(lab.CHECKS)
    assert all(ln.startswith("PASS") for ln in out.splitlines())
    code, out, _ = run(capsys, "verify", "--only", "closeness")
    assert code == 0 and len(out.splitlines()) == 1 and "closeness" in out


def test_verify_detects_bad_rank_threshold(capsys):
    code, out, _ = run(capsys, "verify", "--rank-tol", "1e3")
    assert code == 1
    assert "FAIL laplacian" in out


def test_weil(capsys, tmp_path):
    code, out, _ = run(capsys, "weil", "--preset", "Z3", "--rep", "char:1/3", "--out", str(tmp_path))
    assert code == 0 and out.startswith("rigid")
    assert json.loads((tmp_path / "weil.json").read_text())["rigid"] is True
    code, out, _ = run(capsys, "weil", "--preset", "Z", "--rep", "rotation:pi/3")
    assert out.startswith("not certified")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cohomolab", "cohomology", "--preset", "Z", "--rep", "char:1/2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "euler audit: ok" in proc.stdout
