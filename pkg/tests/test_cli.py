import csv
import io
import json

import pytest

from choreobraid.cli import EXIT_BAD_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compositions(capsys):
    code, out, _ = run(capsys, "compositions", "5")
    data = json.loads(out)
    assert code == EXIT_OK and data["class_count"] == 6 == data["class_count_formula"]
    assert len(data["compositions"]) == 8
    code, out, _ = run(capsys, "compositions", "4", "--format", "csv")
    assert len(list(csv.reader(io.StringIO(out)))) == 1 + 4


def test_table1_csv_and_figure(capsys, tmp_path):
    out_file = tmp_path / "table.csv"
    assert main(["table1", "6", "--out", str(out_file)]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out_file.read_text())))
    assert [r["N"] for r in rows] == ["3", "4", "5", "6"]
    assert rows[1]["argmin"] == "(1,2);(2,1)" and rows[3]["lambda_max"] == "4.791288"
    svg = out_file.with_suffix(".svg")
    first = svg.read_bytes()
    assert main(["table1", "6", "--out", str(out_file)]) == EXIT_OK
    assert svg.read_bytes() == first
    capsys.readouterr()


def test_stretch_and_classify(capsys):
    code, out, _ = run(capsys, "stretch", "1,2")
    data = json.loads(out)
    assert code == EXIT_OK and abs(data["lambda"] - 2.29663) < 1e-5
    code, out, _ = run(capsys, "classify", "+++")
    assert json.loads(out)["classification"] == "periodic"
    code, out, _ = run(capsys, "classify", "+-+")
    assert abs(json.loads(out)["lambda"] - (2 + 3 ** 0.5)) < 1e-9


def test_growth(capsys):
    code, out, _ = run(capsys, "growth", "s1 s2'")
    assert code == EXIT_OK and abs(json.loads(out)["growth_rate"] - 2.618034) < 1e-5
    code, out, _ = run(capsys, "growth", "1,2,3,4,1,2")
    assert abs(json.loads(out)["growth_rate"] - 1.72208) < 1e-4


@pytest.mark.parametrize("argv", [
    ["compositions", "1"],
    ["classify", "+x-"],
    ["stretch", "0,2"],
    ["growth", "s1 q2"],
    ["solve", "4", "+-"],
    ["verify", "/nonexistent/file.json"],
])
def test_bad_input(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_BAD_INPUT and "error" in err


def test_solve_verify_extract(capsys, tmp_path):
    path = tmp_path / "fig8.json"
    code, out, _ = run(capsys, "solve", "3", "+-", "--grid", "64", "--out", str(path))
    assert code == EXIT_OK and json.loads(out)["converged"]
    first = path.read_bytes()
    assert path.with_suffix(".svg").exists()
    code, out, _ = run(capsys, "solve", "3", "+-", "--grid", "64", "--out", str(path))
    assert path.read_bytes() == first
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_OK and json.loads(out)["passed"]
    code, out, _ = run(capsys, "extract", str(path))
    assert json.loads(out)["word"] == "s2 s1'"
