import csv
import io
import json

import pytest

from ifs_harmonic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--no-wall-time")
    return code, json.loads(out)


def test_attractor_rows(capsys):
    code, out, _ = run(capsys, "attractor", "--lambda", "1/3", "--system", "B01", "--depth", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["lo", "hi"]
    assert len(rows) == 1 + 32


def test_cycles_two_w_one_cycles(capsys):
    code, doc = run_json(capsys, "cycles", "--lambda", "3/4", "--max-period", "8")
    assert code == 0 and doc["ok"]
    assert doc["schema"] == 1 and doc["command"] == "cycles"
    assert doc["input"]["lam_text"] == "3/4"
    assert [c["word"] for c in doc["summary"]["w_one_cycles"]] == [[0], [1]]
    assert all({"claim", "pass", "value", "tolerance"} <= set(v) for v in doc["verdicts"])


def test_cycles_outside_d_single_cycle(capsys):
    code, doc = run_json(capsys, "cycles", "--lambda", "2/3", "--max-period", "6")
    assert code == 0
    assert len(doc["summary"]["w_one_cycles"]) == 1


def test_fourier_ok(capsys):
    code, doc = run_json(capsys, "fourier", "--lambda", "1/2", "--samples", "50")
    assert code == 0 and doc["ok"]
    assert "wall_time_s" not in doc


def test_wall_time_present_by_default(capsys):
    code, out, _ = run(capsys, "fourier", "--lambda", "1/2", "--samples", "5")
    assert code == 0
    assert json.loads(out)["wall_time_s"] >= 0


def test_wiener_ok(capsys):
    code, doc = run_json(capsys, "wiener", "--lambda", "1/2", "--nmax", "10")
    assert code == 0 and doc["ok"]


def test_measure_and_paths(capsys):
    code, doc = run_json(capsys, "measure", "--lambda", "1/2", "--samples", "200000")
    assert code == 0 and doc["ok"]
    code, doc = run_json(capsys, "paths", "--lambda", "2/3", "--x", "0.3", "--n-paths", "200")
    assert code == 0


def test_harmonic_reports_violation(capsys):
    # the >= 0.999 mass claim does not hold at this depth
    code, doc = run_json(capsys, "harmonic", "--lambda", "3/4", "--depth", "8", "--grid", "5")
    assert code == 2 and not doc["ok"]
    assert any(not v["pass"] for v in doc["verdicts"])


@pytest.mark.parametrize("argv", [
    ["cycles"],
    ["cycles", "--lambda", "abc"],
    ["cycles", "--lambda", "3/2"],
    ["nonsense", "--lambda", "1/2"],
    ["paths", "--lambda", "2/3", "--x", "5.0"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith("error:")
    assert out == ""


def test_csv_byte_identical(capsys):
    argv = ("measure", "--lambda", "3/4", "--samples", "50000", "--format", "csv", "--seed", "7")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and a


def test_json_byte_identical(capsys):
    argv = ("paths", "--lambda", "3/4", "--x", "0.4", "--n-paths", "100", "--seed", "0x10", "--no-wall-time")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    assert json.loads(a)["input"]["seed"] == 16


def test_output_prefix(tmp_path, capsys):
    prefix = str(tmp_path / "run")
    code, out, _ = run(capsys, "attractor", "--lambda", "1/2", "--depth", "3", "--output", prefix)
    assert code == 0 and out == ""
    assert (tmp_path / "run.csv").read_text().startswith("lo,hi\n")
    assert json.loads((tmp_path / "run.json").read_text())["command"] == "attractor"
