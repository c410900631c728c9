"""End-to-end runs of the command-line entry point."""

from __future__ import annotations

import csv
import json
import math

import pytest

from pairlab.errors import EXIT_BAD_ARGUMENTS, EXIT_NON_CONVERGENCE, EXIT_OK
from pairlab.main import main

SMALL_GRID = ["--grid-extent", "8", "--grid-points", "161"]


def _read_csv(path):
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    return lines[0], list(csv.DictReader(lines[1:]))


def _read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def test_spectrum_csv_is_reproducible(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["spectrum", "--steps", "10", "--branches", "1", "--threads", "1"]
    assert main(args + ["--output", str(first)]) == EXIT_OK
    assert main(args + ["--output", str(second)]) == EXIT_OK
    comment, rows = _read_csv(first)
    assert comment == "# schema_version=1,command=spectrum"
    assert len(rows) == 10
    assert list(rows[0]) == ["branch", "gamma", "eps_r"]
    assert float(rows[0]["gamma"]) == -8.0
    assert first.read_bytes() == second.read_bytes()


def test_spectrum_json(tmp_path):
    path = tmp_path / "spectrum.json"
    assert main(["spectrum", "--steps", "3", "--branches", "2", "--format", "json", "--output", str(path)]) == EXIT_OK
    payload = _read_json(path)
    assert payload["schema_version"] == 1
    assert payload["command"] == "spectrum"
    assert [row["branch"] for row in payload["rows"]] == [0, 0, 0, 1, 1, 1]
    assert payload["rows"][1]["eps_r"] == 0.5


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--steps", "1"],
        ["launch"],
        ["decompose", "--lambda", "1.5"],
        ["decompose"],
        ["oracle", "--state", "exact"],
        ["spectrum", "--grid-points", "800"],
    ],
)
def test_bad_arguments_exit_with_one(argv):
    assert main(argv) == EXIT_BAD_ARGUMENTS


def test_large_defect_exits_with_two(tmp_path):
    config = tmp_path / "strict.env"
    config.write_text("MAX_DEFECT=1e-6\n")
    assert main(["decompose", "--lambda", "-2", "--config", str(config)]) == EXIT_NON_CONVERGENCE


def test_decompose_rows(tmp_path):
    path = tmp_path / "decompose.csv"
    assert main(["decompose", "--lambda", "1", "--top", "3", "--output", str(path)]) == EXIT_OK
    _, rows = _read_csv(path)
    assert {row["representation"] for row in rows} == {"slater"}
    assert float(rows[0]["eigenvalue"]) == pytest.approx(0.5)
    assert float(rows[0]["k_number"]) == pytest.approx(1.0)


def test_decompose_from_gamma(tmp_path):
    path = tmp_path / "decompose.json"
    assert main(["decompose", "--gamma", "0", "--top", "2", "--format", "json", "--output", str(path)]) == EXIT_OK
    rows = _read_json(path)["rows"]
    schmidt = [row for row in rows if row["representation"] == "schmidt"]
    assert schmidt[0]["eigenvalue"] == pytest.approx(1.0, abs=1e-8)


def test_noninteracting_to_stdout(capsys):
    assert main(["noninteracting", "--levels", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# schema_version=1,command=noninteracting"
    rows = list(csv.DictReader(lines[1:]))
    assert [float(row["s_lin"]) for row in rows] == pytest.approx([0.0, 0.5, 0.625])
    assert float(rows[2]["bound"]) == pytest.approx(2.0 / 3.0)


def test_fermionized_ladder_rows(tmp_path):
    path = tmp_path / "fermionized.csv"
    assert main(["fermionized", "--max-energy", "5", "--output", str(path)]) == EXIT_OK
    _, rows = _read_csv(path)
    assert len(rows) == 6
    assert [int(float(row["energy"])) for row in rows] == [2, 3, 4, 4, 5, 5]


def test_oracle_round_trip_through_json(tmp_path):
    first = tmp_path / "oracle.json"
    argv = ["oracle", "--state", "product", "--top-k", "1", "--format", "json"] + SMALL_GRID
    assert main(argv + ["--output", str(first)]) == EXIT_OK
    rows = _read_json(first)["rows"]
    assert rows[0]["analytic"] == 1.0
    assert rows[0]["grid"] == pytest.approx(1.0, abs=1e-10)
    second = tmp_path / "again.json"
    assert main(argv + ["--analytic", str(first), "--output", str(second)]) == EXIT_OK
    assert _read_json(second)["rows"] == rows


def test_oracle_against_decompose_output(tmp_path):
    reference = tmp_path / "decompose.json"
    assert main(["decompose", "--lambda", "0.5", "--format", "json", "--output", str(reference)]) == EXIT_OK
    path = tmp_path / "oracle.csv"
    argv = ["oracle", "--lambda", "0.5", "--top-k", "4", "--analytic", str(reference), "--output", str(path)]
    assert main(argv + SMALL_GRID) == EXIT_OK
    _, rows = _read_csv(path)
    assert len(rows) == 4
    assert all(float(row["deviation"]) < 2e-2 for row in rows)


def test_oracle_rejects_foreign_reference(tmp_path):
    spectrum = tmp_path / "spectrum.json"
    assert main(["spectrum", "--steps", "2", "--branches", "1", "--format", "json", "--output", str(spectrum)]) == EXIT_OK
    argv = ["oracle", "--state", "product", "--top-k", "1", "--analytic", str(spectrum)] + SMALL_GRID
    assert main(argv) == EXIT_BAD_ARGUMENTS


def test_verify_rows(tmp_path):
    path = tmp_path / "verify.json"
    argv = ["verify", "--lambda", "0", "1", "--spacing", "0.01", "--threads", "1", "--format", "json", "--output", str(path)]
    assert main(argv) == EXIT_OK
    rows = _read_json(path)["rows"]
    assert [row["lambda_t"] for row in rows] == [0.0, 1.0]
    assert rows[0]["jump_expected"] == 0.0
    assert rows[0]["max_residual"] < 1e-4
    assert rows[1]["jump_measured"] is None


def test_small_scan(tmp_path):
    path = tmp_path / "scan.csv"
    argv = ["scan", "--lambda-min", "-1", "--lambda-max", "0.5", "--steps", "3", "--no-pair-size",
            "--threads", "1", "--output", str(path)]
    assert main(argv) == EXIT_OK
    _, rows = _read_csv(path)
    assert [float(row["lambda_t"]) for row in rows] == [-1.0, -0.25, 0.5]
    assert all(row["error"] == "" for row in rows)
    assert all(math.isfinite(float(row["k_number_f"])) for row in rows)
    assert all(row["pair_size"] == "nan" for row in rows)
