import json
import subprocess
import sys
from pathlib import Path

import pytest

from askm.bench import read_csv
from askm.cli import main
from askm.core import load_problem_document

DATA = Path(__file__).parent / "data"


@pytest.fixture
def problem_file(tmp_path):
    path = tmp_path / "p.json"
    assert main(["generate", "--kind", "gaussian", "--m", "60", "--n", "6", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_generate_stores_witness(problem_file):
    p, doc = load_problem_document(problem_file)
    assert (p.m, p.n) == (60, 6) and len(doc["witness"]) == 6
    assert doc["generator"]["kind"] == "gaussian"


@pytest.mark.parametrize("method", ["skm", "askm"])
def test_solve_writes_trace(problem_file, tmp_path, method):
    out = tmp_path / "t.csv"
    assert main(["solve", str(problem_file), "--method", method, "--beta", "5", "--log-stride", "2",
                 "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["k", "wall_seconds", "residual_norm", "fsc", "max_violation"]
    assert float(rows[-1][2]) <= 1e-5


def test_solve_to_stdout(problem_file, capsys):
    assert main(["solve", str(problem_file), "--beta", "60", "--x0", "zeros"]) == 0
    assert capsys.readouterr().out.startswith("k,wall_seconds")


def test_bench_config_with_cli_override(tmp_path, problem_file):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"problem": {"path": str(problem_file)}, "trials": 5,
                               "methods": [{"method": "skm", "beta": 3}], "outputs": str(tmp_path / "ignored")}))
    out = tmp_path / "res"
    assert main(["bench", "--config", str(cfg), "--trials", "2", "--out", str(out), "--beta", "4"]) == 0
    _, rows = read_csv(out / "summary.csv")
    assert rows == [rows[0]] and rows[0][:3] == ["skm", "4", "2"]
    assert not (tmp_path / "ignored").exists()


def test_bench_generator_sweep(tmp_path):
    out = tmp_path / "sweep"
    assert main(["bench", "--kind", "correlated", "--m", "200", "--n", "20", "--beta-sweep", "1,10,50",
                 "--trials", "2", "--method", "skm", "--method", "askm", "--out", str(out)]) == 0
    _, rows = read_csv(out / "summary.csv")
    assert [r[0] for r in rows] == ["skm"] * 3 + ["askm"] * 3


def test_transform(tmp_path):
    out = tmp_path / "lf.json"
    assert main(["transform", str(DATA / "tiny.mps"), "--optimum-file", str(DATA / "optima.json"),
                 "--out", str(out)]) == 0
    p, doc = load_problem_document(out)
    assert (p.m, p.n) == (2 * 1 + 0 + 3 + 1, 3) and doc["p_star"] == 0.0
    assert main(["transform", str(DATA / "tiny.mps"), "--p-star", "1.5", "--out", str(out)]) == 0


def test_bounds(problem_file, tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bounds", str(problem_file), "--beta", "5", "--k-max", "20", "--xstar", "witness",
                 "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["k", "bound_v", "bound_x", "lambda_zero_limit"] and len(rows) == 21


def test_bounds_lambda_zero_note(problem_file, tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["bounds", str(problem_file), "--beta", "5", "--lambda", "0", "--k-max", "2",
                 "--xstar", "witness", "--out", str(out)]) == 0
    assert "note:" in capsys.readouterr().err
    assert all(r[2] == "" for r in read_csv(out)[1])


@pytest.mark.parametrize("argv", [
    ["solve", "missing.json", "--beta", "2"],
    ["solve", "{problem}", "--beta", "999"],
    ["solve", "{problem}"],
    ["solve", "{problem}", "--beta", "2", "--method", "askm", "--lambda", "1e9"],
    ["transform", str(DATA / "tiny.mps"), "--optimum-file", str(DATA / "optima.json"), "--name", "NOPE", "--out", "x"],
    ["bench", "--trials", "2"],
])
def test_errors_exit_nonzero(argv, problem_file, capsys):
    argv = [a.replace("{problem}", str(problem_file)) for a in argv]
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_mps_exit(tmp_path, capsys):
    bad = tmp_path / "bad.mps"
    bad.write_text("NAME X\nROWS\n N C\nCOLUMNS\nENDATA\n")
    assert main(["transform", str(bad), "--p-star", "0", "--out", str(tmp_path / "o.json")]) == 2


def test_module_entry_point(problem_file):
    res = subprocess.run([sys.executable, "-m", "askm", "solve", str(problem_file), "--beta", "3"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("k,")
