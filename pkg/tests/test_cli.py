import csv
import json
from pathlib import Path

import pytest

from qfock.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main

GOLDEN = json.loads((Path(__file__).parent / "golden" / "schema.json").read_text())

ARGS = {
    "verify": ["verify", "--d", "2", "--q", "0.5", "--nmax", "3"],
    "spectrum": ["spectrum", "--d", "2", "--q", "0.5", "--nmax", "3"],
    "bound": ["bound", "--terms", "4"],
    "sweep": ["sweep", "--q-min", "0.4", "--q-max", "0.44", "--steps", "2", "--nmax", "4"],
    "bench": ["bench", "--nmax", "4"],
}


def run(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("command", sorted(ARGS))
def test_schema_matches_golden(capsys, command):
    code, payload = run(capsys, ARGS[command])
    expected = GOLDEN["commands"][command]
    assert code == EXIT_OK
    assert payload["schema_version"] == GOLDEN["schema_version"]
    assert sorted(payload) == expected["keys"]
    assert sorted(payload["config"]) == expected["config_keys"]
    assert all(sorted(c) == expected["check_keys"] for c in payload["checks"])
    assert [c["name"] for c in payload["checks"]] == expected["checks"]
    assert payload.get("table", {}).get("columns") == expected["columns"]


@pytest.mark.parametrize("command", ["spectrum", "bound", "sweep", "bench"])
def test_csv_header_matches_golden(capsys, tmp_path, command):
    code, payload = run(capsys, ARGS[command] + ["--out", "csv", "--dir", str(tmp_path)])
    assert code == EXIT_OK
    with open(payload["csv"], newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == GOLDEN["commands"][command]["columns"]
    assert len(rows) == len(payload["table"]["rows"]) + 1


def strip_timing(payload):
    return {k: v for k, v in payload.items() if k != "timing"}


@pytest.mark.parametrize("command", ["verify", "sweep"])
def test_deterministic(capsys, command):
    _, a = run(capsys, ARGS[command])
    _, b = run(capsys, ARGS[command])
    assert strip_timing(a) == strip_timing(b)


def test_verify_q_zero_exact(capsys):
    code, payload = run(capsys, ["verify", "--d", "2", "--q", "0", "--nmax", "6"])
    assert code == EXIT_OK
    defects = [c for c in payload["checks"] if c["name"] not in
               ("gram_positive_definite_min_ratio", "r_min_singular_value")]
    assert all(c["value"] <= 1e-14 for c in defects)


def test_verify_passes_at_half(capsys):
    code, payload = run(capsys, ["verify", "--d", "2", "--q", "0.5", "--nmax", "6"])
    assert code == EXIT_OK and all(c["pass"] for c in payload["checks"])


def test_check_failure_exit_code(capsys):
    code, payload = run(capsys, ["verify", "--d", "2", "--q", "0.9", "--nmax", "5", "--tol", "1e-30"])
    assert code == EXIT_FAIL
    assert not all(c["pass"] for c in payload["checks"])


@pytest.mark.parametrize("argv", [
    ["verify", "--d", "2", "--q", "1.5"],
    ["verify", "--d", "1", "--q", "0.5"],
    ["spectrum", "--q", "0.5", "--nmax", "0"],
    ["bound", "--terms", "1"],
    ["sweep", "--q-min", "0.5", "--q-max", "0.4"],
    ["bench", "--repeat", "0"],
    ["verify", "--d", "3", "--q", "0.5", "--nmax", "9"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_spectrum_rows(capsys):
    _, payload = run(capsys, ["spectrum", "--d", "2", "--q", "0.5", "--nmax", "2"])
    rows = payload["table"]["rows"]
    assert rows[0]["alpha"] == pytest.approx(1.0, abs=1e-12)
    assert rows[1]["alpha"] == pytest.approx(0.5, abs=1e-12)
    assert all(r["lower_bound"] <= r["alpha"] <= r["upper_bound"] for r in rows)


def test_bound_values(capsys):
    _, p2 = run(capsys, ["bound", "--terms", "2"])
    _, p4 = run(capsys, ["bound", "--terms", "4"])
    _, p12 = run(capsys, ["bound", "--terms", "12"])
    r2, r4, r12 = (p["table"]["rows"][0]["root"] for p in (p2, p4, p12))
    assert abs(r2 - 0.4142136) < 1e-6 and abs(r4 - 0.4400565) < 1e-6
    assert f"{r4:.5g}" == f"{r12:.5g}"


def test_sweep_rows(capsys):
    _, payload = run(capsys, ["sweep", "--q-min", "0", "--q-max", "0", "--steps", "1", "--nmax", "4"])
    (row,) = payload["table"]["rows"]
    assert row["margin"] == pytest.approx(1.0) and row["verdict"] == "holds-empirically"


def test_bench_peak_dimensions(capsys):
    _, payload = run(capsys, ["bench", "--d", "2", "--nmax", "10"])
    rows = {(r["mode"], r["n"]): r for r in payload["table"]["rows"]}
    assert rows[("dense", 10)]["peak_dim"] == 1024
    assert rows[("blocks", 10)]["peak_dim"] == 252
    assert rows[("blocks", 10)]["entries"] < rows[("dense", 10)]["entries"]
    assert all(c["pass"] for c in payload["checks"])
