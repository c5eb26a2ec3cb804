import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import jsonschema
import numpy as np
import pytest

from fricke_zeros import cli
from fricke_zeros.modular_core import fricke_level
from fricke_zeros.poincare import EvalParams, eval_F_grid


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_csv_contract(capsys):
    code, out, _ = run(capsys, "eval", "--p", "2", "--k", "8", "--n", "0", "--grid", "16", "--format", "csv")
    assert code == 0
    assert "\r" not in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["theta", "F", "re2g", "re2h", "Ftail", "imag"]
    assert len(rows) == 17
    last = dict(zip(rows[0], rows[-1]))
    assert float(last["theta"]) == pytest.approx(fricke_level(2).theta0)
    assert float(last["F"]) < 0


def test_eval_csv_p3_has_two_h_columns(capsys):
    _, out, _ = run(capsys, "eval", "--p", "3", "--k", "12", "--n", "-1", "--grid", "4", "--format", "csv")
    assert out.splitlines()[0] == "theta,F,re2g,re2h,re2h2,Ftail,imag"


def test_eval_json_round_trip(capsys):
    code, out, _ = run(capsys, "eval", "--p", "3", "--k", "12", "--n", "-1", "--grid", "64", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["samples"]) == 64
    lvl = fricke_level(3)
    th = np.linspace(lvl.theta1, lvl.theta0, 64)
    ev = eval_F_grid(th, EvalParams.make(12, 3, -1))
    # floats are written with repr, so parsing gives back the exact doubles
    assert [s["theta"] for s in doc["samples"]] == th.tolist()
    assert [s["F"] for s in doc["samples"]] == ev.f.tolist()
    assert all(abs(s["imag"]) < 1e-10 for s in doc["samples"])


def test_eval_text(capsys):
    code, out, _ = run(capsys, "eval", "--k", "8", "--grid", "3")
    assert code == 0 and out.startswith("# p=2 k=8 n=0")


def test_zeros_json(capsys):
    code, out, _ = run(capsys, "zeros", "--p", "2", "--k", "12", "--n", "-3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["weighted_total"] == "9/2"
    assert doc["verdict"] == "pass"
    assert doc["unaccounted"] == "0"
    assert Fraction(doc["required"]) == Fraction(9, 2)


def test_zeros_csv_lists_refined_zeros(capsys):
    code, out, _ = run(capsys, "zeros", "--p", "2", "--k", "12", "--n", "-3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert all(float(r["theta_lo"]) <= float(r["theta"]) <= float(r["theta_hi"]) for r in rows)


def test_zeros_p3_k4(capsys):
    code, out, _ = run(capsys, "zeros", "--p", "3", "--k", "4", "--n", "0", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["interior_count"] == 0
    assert doc["endpoint_orders"][1] >= 1


def test_zeros_full_count_case_exits_fail(capsys):
    # the arc carries none of the finite zeros here; the missing one is on Re z = -1/2
    code, out, _ = run(capsys, "zeros", "--p", "2", "--k", "16", "--n", "2")
    assert code == 1
    assert "verdict: fail" in out
    assert "y = 1.2042540700" in out


def test_zeros_inconclusive_exit(capsys):
    code, out, _ = run(capsys, "zeros", "--p", "2", "--k", "16", "--n", "-1", "--tail-tol", "100")
    assert code == 2
    assert "verdict: inconclusive" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["zeros", "--p", "5"],
        ["zeros", "--k", "7"],
        ["zeros", "--k", "16", "--n", "5"],
        ["zeros", "--grid", "100"],
        ["bogus"],
        [],
        ["eval", "--tail-tol", "0"],
        ["verify-lemma", "--theorem", "3"],
        ["verify-lemma", "--theorem", "1", "--k", "4..x"],
        ["verify-lemma", "--theorem", "2", "--k", "4..6", "--m", "1..l"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = run_safely(capsys, argv)
    assert code == 3
    assert out == ""
    assert "error" in err


def run_safely(capsys, argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_lemma_single(capsys):
    code, out, _ = run(capsys, "verify-lemma", "--theorem", "1", "--p", "2", "--k", "4", "--m", "1")
    assert code == 0
    assert out.splitlines()[-1] == "certified 1/1"
    margin = float(out.split("margin ")[1].split(",")[0])
    assert margin >= 1 - 0.93277 - 0.038003


def test_verify_lemma_ranges(capsys):
    code, out, _ = run(capsys, "verify-lemma", "--theorem", "2", "--p", "2", "--k", "16..60", "--m", "1..l")
    assert code == 0
    n = int(out.splitlines()[-1].split("/")[1])
    assert out.splitlines()[-1] == f"certified {n}/{n}"


def test_verify_lemma_json(capsys):
    code, out, _ = run(capsys, "verify-lemma", "--theorem", "1", "--p", "3", "--k", "10", "--m", "11..13",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert [r["n"] for r in doc["rows"]] == [-11, -12, -13]
    assert doc["certified"] == doc["total"] == 3


def test_tables(capsys):
    code, out, _ = run(capsys, "tables", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 13
    assert list(rows[0]) == ["table", "s1", "s2", "a1", "a2", "value", "paper_value", "abs_err", "admissible"]
    assert all(float(r["abs_err"]) <= 5e-5 for r in rows)
    code, out, _ = run(capsys, "tables", "--format", "json")
    doc = json.loads(out)
    assert doc["theorem1_p3"][-1]["a1"] == "239/100"
    assert doc["theorem1_p3"][-1]["s2"] == "inf"
    assert len(doc["theorem2_p3"]) == 6


def test_output_file(tmp_path, capsys):
    target = tmp_path / "t.json"
    code, out, _ = run(capsys, "tables", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["theorem2_p3"][0]["paper_value"] == 0.97955


def test_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("FRICKE_ZEROS_THREADS", "1")
    assert run(capsys, "tables")[0] == 0
    monkeypatch.setenv("FRICKE_ZEROS_THREADS", "many")
    assert run(capsys, "tables")[0] == 3


def test_determinism(capsys):
    argv = ["zeros", "--p", "3", "--k", "18", "--n", "-2", "--format", "json"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_jsonable():
    assert cli.jsonable(Fraction(9, 2)) == "9/2"
    assert cli.jsonable(float("nan")) is None
    assert cli.jsonable(float("-inf")) == "-inf"
    assert cli.jsonable(np.float64(0.1)) == 0.1
    assert cli.jsonable({"a": (1, np.int64(2))}) == {"a": [1, 2]}
    with pytest.raises(TypeError):
        cli.jsonable(object())
    assert json.loads(cli.dumps({"x": math.pi}))["x"] == math.pi


def test_parse_range():
    assert cli._parse_range("16..60") == (16, 60)
    assert cli._parse_range("1..l") == (1, "l")
    assert cli._parse_range("7") == (7, 7)
    with pytest.raises(cli.UsageError):
        cli._parse_range("1-3")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fricke_zeros", "tables"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("table  s1")


@pytest.fixture(scope="module")
def report_runs(tmp_path_factory):
    d = tmp_path_factory.mktemp("report")
    outs = []
    for i in range(2):
        path = d / f"r{i}.json"
        code = cli.main(["report", "--format", "json", "--output", str(path), "--csv-dir", str(d / f"csv{i}")])
        outs.append((code, path.read_bytes()))
    return d, outs


def test_report_schema_and_determinism(report_runs):
    d, ((code, first), (_, second)) = report_runs
    assert first == second
    doc = json.loads(first)
    schema = json.loads(cli.SCHEMA_PATH.read_text())
    jsonschema.validate(doc, schema)
    assert len(doc["tables"]) == 13 and len(doc["constants"]) == 9
    assert doc["config"]["command"] == "report"
    # exit 0 only on a full pass; the two full-count cases keep it at 1
    assert code == (0 if doc["all_pass"] else 1)
    assert sorted(doc["failures"]) == ["zeros theorem 2 p=2 k=16 n=2", "zeros theorem 2 p=3 k=12 n=2"]
    files = sorted(p.name for p in (d / "csv0").iterdir())
    assert "zeros.csv" in files and len(files) == 5
    assert (d / "csv0" / "zeros.csv").read_text().startswith("p,k,n,theta\n")
