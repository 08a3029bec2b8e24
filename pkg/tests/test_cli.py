import csv
import io
import json
import math
import subprocess

import pytest


def run_cli(*args, cwd=None):
    return subprocess.run(
        ["riffle", *args], capture_output=True, text=True, cwd=cwd
    )


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_constants_point_measure():
    res = run_cli("constants", "--measure", "point:0.5,0.5")
    assert res.returncode == 0
    rows = parse_csv(res.stdout)
    assert len(rows) == 1
    row = rows[0]
    assert float(row["theta"]) == 3.0
    assert float(row["psi2"]) == round(math.log(2), 10)
    assert float(row["C_bar"]) == 2.164042561
    assert row["k"] == "2"


def test_constants_table_has_ten_rows():
    res = run_cli("constants", "--table1")
    assert res.returncode == 0
    rows = parse_csv(res.stdout)
    assert len(rows) == 10
    names = [r["measure"] for r in rows]
    assert "Beta(1,1)" in names and "Point(1/2,1/2)" in names
    for r in rows:
        assert float(r["C_bar"]) == max(float(r["C"]), float(r["C_tilde"]))


def test_simulate_zero_steps_is_identity():
    res = run_cli("simulate", "-N", "6", "-K", "0", "--samples", "4")
    assert res.returncode == 0
    rows = parse_csv(res.stdout)
    assert len(rows) == 4
    for r in rows:
        assert r["deck"] == "1 2 3 4 5 6"
        assert r["rising_sequences"] == "1"
        assert r["inverse_longest_run"] == "6"


def test_simulate_bisection_rising_cap():
    res = run_cli(
        "simulate", "--process", "bisection", "-N", "52", "-K", "1", "--samples", "8"
    )
    assert res.returncode == 0
    for r in parse_csv(res.stdout):
        assert int(r["rising_sequences"]) <= 2


def test_repeat_runs_are_byte_identical_across_threads():
    a = run_cli("simulate", "-N", "30", "-K", "3", "--samples", "5", "--seed", "11")
    b = run_cli(
        "simulate",
        "-N",
        "30",
        "-K",
        "3",
        "--samples",
        "5",
        "--seed",
        "11",
        "--threads",
        "4",
    )
    assert a.stdout == b.stdout and a.returncode == b.returncode == 0
    c = run_cli("simulate", "-N", "30", "-K", "3", "--samples", "5", "--seed", "12")
    assert c.stdout != a.stdout


def test_exact_tvd_values():
    res = run_cli("tvd", "-N", "5", "-K", "1", "--exact")
    assert res.returncode == 0
    rows = parse_csv(res.stdout)
    assert rows[0]["method"] == "exact"
    assert float(rows[0]["tv"]) == 0.775

    curve = run_cli("tvd", "-N", "5", "--kmax", "4", "--exact")
    vals = [float(r["tv"]) for r in parse_csv(curve.stdout)]
    assert len(vals) == 5
    assert vals[0] == pytest.approx(119 / 120)
    assert all(x >= y - 1e-12 for x, y in zip(vals, vals[1:]))


def test_out_writes_csv_json_and_png(tmp_path):
    base = tmp_path / "run"
    res = run_cli(
        "scan",
        "--measure",
        "point:0.5,0.5",
        "-N",
        "64",
        "--kgrid",
        "0.5:3.5:1.0",
        "--samples",
        "200",
        "--out",
        str(base),
    )
    assert res.returncode == 0
    csv_path = base.with_suffix(".csv")
    png_path = base.with_suffix(".png")
    assert csv_path.exists() and png_path.exists()
    assert png_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    rows = parse_csv(csv_path.read_text())
    assert {r["coefficient"] for r in rows} == {"0.5", "1.5", "2.5"}
    # Rerunning into a second base produces identical deliverables.
    base2 = tmp_path / "rerun"
    res2 = run_cli(
        "scan",
        "--measure",
        "point:0.5,0.5",
        "-N",
        "64",
        "--kgrid",
        "0.5:3.5:1.0",
        "--samples",
        "200",
        "--out",
        str(base2),
    )
    assert res2.returncode == 0
    assert base2.with_suffix(".csv").read_bytes() == csv_path.read_bytes()
    assert base2.with_suffix(".png").read_bytes() == png_path.read_bytes()
    # JSON format writes OUT.json instead of OUT.csv, same figure.
    base3 = tmp_path / "asjson"
    res3 = run_cli(
        "constants",
        "--measure",
        "point:0.5,0.5",
        "--format",
        "json",
        "--out",
        str(base3),
    )
    assert res3.returncode == 0
    doc = json.loads(base3.with_suffix(".json").read_text())
    assert doc["config"]["seed"] == doc["meta"]["seed"]
    assert "config_sha256" in doc["meta"]
    assert base3.with_suffix(".png").exists()


def test_json_format_output():
    res = run_cli(
        "constants", "--measure", "point:0.5,0.5", "--format", "json"
    )
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["results"][0]["C_bar"] == 2.164042561
    assert doc["meta"]["version"]


def test_errors_are_json_on_stderr():
    bad = run_cli("constants", "--measure", "nope:1")
    assert bad.returncode == 2
    err = json.loads(bad.stderr)
    assert err["error"] == "InvalidParams"

    vertex = run_cli("constants", "--measure", "point:1.0,0.0")
    assert vertex.returncode == 2
    assert json.loads(vertex.stderr)["error"] == "DegenerateMeasure"

    neg = run_cli("simulate", "-N", "10", "-K", "1", "--threads", "0")
    assert neg.returncode == 2


def test_nonconvex_verdict():
    res = run_cli("nonconvex", "--eta", "0.01")
    assert res.returncode == 0
    rows = parse_csv(res.stdout)
    assert len(rows) == 1
    assert float(rows[0]["cbar_f"]) == 0.25
    assert float(rows[0]["cbar_breve"]) == 0.25
    assert float(rows[0]["cbar_hat"]) > 0.25
    assert rows[0]["strict_gap"] == "1"
