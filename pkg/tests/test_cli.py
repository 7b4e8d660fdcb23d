import csv
import io
import json
import math
import subprocess
import sys

import pytest

from splinepower import cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_parse_range():
    assert cli.parse_range("1:3,7") == [1, 2, 3, 7]
    assert cli.parse_range("-1:1") == [-1, 0, 1]
    assert cli.parse_range("p-1,0") == [None, 0]
    assert cli.parse_range(None, [5]) == [5]
    assert cli.parse_range("4:2") == []


def test_truncated_prefix():
    assert cli.truncated_prefix(0.98519) == "0.9851"
    assert cli.truncated_prefix(0.81729999) == "0.8172"


def test_reproduce_passes_and_is_deterministic(capsys):
    code1, out1 = run(["--command", "reproduce"], capsys)
    code2, out2 = run(["--command", "reproduce"], capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    assert "FAIL" not in out1
    assert "Theta_2,-1,3\",0.817230066567,0.8172,pass" in out1


def test_reproduce_json(capsys):
    code, out = run(["--command", "reproduce", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["all_passed"] is True
    assert len([c for c in doc["checks"] if c["section"] == "theta"]) == 11
    assert {r["kind"] for r in doc["regions"]} == {"fem", "dg"}


def test_reproduce_fails_on_bad_reference(monkeypatch, capsys):
    monkeypatch.setattr(cli, "REFERENCE_PREFIXES", (((3, 0, 7), "0.9633"),))
    code, out = run(["--command", "reproduce"], capsys)
    assert code == 1 and "FAIL" in out


def test_estimate_rows(capsys):
    code, out = run(["--command", "estimate", "--p", "0", "--k=-1", "--n", "1", "--q", "0"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1
    assert abs(float(rows[0]["estimate"]) - 1 / math.pi) < 1e-3
    assert rows[0]["status"] == "ok" and rows[0]["in_bracket"] == "true"


def test_estimate_empty_range_header_only(capsys):
    code, out = run(["--command", "estimate", "--p", "3", "--n", "5:4"], capsys)
    assert code == 0
    assert out == ",".join(cli.ESTIMATE_HEADER) + "\n"


def test_estimate_never_aborts(capsys):
    code, out = run(["--command", "estimate", "--p", "11", "--k", "0", "--n", "1"], capsys)
    assert code == 0 and "PrecisionError" in out


def test_estimate_sweep_parallel_matches_serial(monkeypatch, capsys):
    argv = ["--command", "estimate", "--p", "0:2", "--k=-1,p-1", "--n", "1:2", "--format", "json"]
    _, serial = run(argv, capsys)
    monkeypatch.setenv("SPLINEPOWER_THREADS", "3")
    _, par = run(argv, capsys)
    assert serial == par
    assert all(r["status"] == "ok" for r in json.loads(par))


def test_bounds_and_ratio(capsys):
    _, out = run(["--command", "bounds", "--p", "0", "--k=-1", "--n", "1"], capsys)
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert float(row["upper"]) == pytest.approx(1 / math.pi, rel=1e-11)
    _, out = run(["--command", "ratio", "--p", "9", "--q", "1", "--k", "0", "--n", "1"], capsys)
    assert "MInvalid" in out


def test_region_csv(capsys):
    _, out = run(["--command", "region", "--k", "0", "--p", "6", "--n", "3"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 7 * 3
    cell = [r for r in rows if r["p"] == "6" and r["n"] == "3"][0]
    assert cell["verdict"] == "SmoothBetter" and cell["base_point"] == "6:3"


def test_broken_command(capsys, tmp_path):
    out_file = tmp_path / "b.csv"
    code, _ = run(["--command", "broken", "--p", "2", "--k", "1", "--n", "2", "--xi", "1/3,1/2",
                   "--s", "0,-1", "--out", str(out_file)], capsys)
    row = list(csv.DictReader(out_file.open()))[0]
    assert code == 0 and row["dimension"] == "8" and row["status"] == "ok"


def test_tensor_command(capsys):
    code, out = run(["--command", "tensor", "--p", "2,1", "--k", "1,0", "--n", "3,2",
                     "--samples", "4", "--format", "json"], capsys)
    assert code == 0 and all(r["holds"] for r in json.loads(out))


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "splinepower", "--command", "bounds", "--p", "1",
                          "--n", "2"], capture_output=True, text=True, check=True)
    assert out.stdout.startswith("p,k,n,lower,upper")
