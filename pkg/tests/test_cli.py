import csv
import io
import json
import math
import pathlib
import subprocess
import sys

import jsonschema
import pytest

from opnormlab import cli
from opnormlab.tensornorm import random_element

SCHEMA = json.loads((pathlib.Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())


def run_main(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def body(report):
    return {k: v for k, v in report.items() if k != "wall_time_ms"}


def test_gap_csv(capsys):
    code, out, err = run_main(["gap", "--nmax", "6", "--d", "1", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == cli.CSV_COLUMNS["gap"]
    for row in rows:
        assert abs(float(row["ratio"]) - math.sqrt(int(row["n"]))) <= 1e-9
    jsonschema.validate(json.loads(err), SCHEMA)


def test_diamond_transpose(capsys):
    code, out, _ = run_main(["diamond", "--map", "transpose", "--dim", "2"], capsys)
    report = json.loads(out)
    assert code == 0
    assert abs(report["result"]["value"] - 2.0) <= 1e-5
    assert set(report["result"]) >= {"d", "value", "gap"}


def test_cocycle_report(capsys):
    code, out, _ = run_main(["cocycle", "--algebra", "truncpoly", "--degree", "5"], capsys)
    res = json.loads(out)["result"]
    assert code == 0
    assert res["cocycle"] is True and res["antisymmetric"] is True
    assert res["witness"] is not None
    assert isinstance(res["polarization"], bool) and "X4" in res["spans"]


def test_theorem1_input_file(tmp_path, capsys):
    path = tmp_path / "u.json"
    path.write_text(random_element((2, 2), (3, 3), 2, 0).to_json())
    code, out, _ = run_main(["theorem1", "--input", str(path)], capsys)
    res = json.loads(out)["result"]
    assert code == 0 and res["consistent"] and res["lower"] <= res["upper"]


def test_interp_and_selftest_validate(capsys):
    for args in (["interp", "--dims", "2,3", "--pairs", "2", "--restarts", "8", "--count", "2"],
                 ["sdp-selftest", "--count", "3"]):
        code, out, _ = run_main(args, capsys)
        report = json.loads(out)
        jsonschema.validate(report, SCHEMA)
        assert code == 0
        checks = report["checks"]
        assert checks["failed"] == 0 and checks["passed"] > 0


def test_all_is_deterministic_and_counts_checks(tmp_path):
    r1 = cli.run("all", seed=5)
    r2 = cli.run("all", seed=5)
    assert body(r1) == body(r2)
    jsonschema.validate(r1, SCHEMA)
    assert r1["checks"]["failed"] == 0
    assert set(r1["result"]) == {"gap", "interp", "diamond", "theorem1", "cocycle", "sdp-selftest"}
    # check tallies equal the number of executed checks
    n_gap = 3 * len(r1["result"]["gap"]["rows"])
    n_sdp = len(r1["result"]["sdp-selftest"]["instances"])
    expected = n_gap + 1 + 2 + 1 + 6 + n_sdp
    assert sum(r1["checks"].values()) == expected


def test_child_seeds_are_per_command():
    a = cli.child_rng(0, "interp").random()
    b = cli.child_rng(0, "theorem1").random()
    assert a != b
    assert cli.child_rng(0, "interp").random() == a
    # the standalone command and its part of "all" share a stream
    alone = cli.run("theorem1", seed=3)["result"]
    within = cli.run("all", seed=3)["result"]["theorem1"]
    assert alone == within


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nmax": 3, "d": 2, "seed": 4}))
    code, out, _ = run_main(["gap", "--config", str(cfg)], capsys)
    report = json.loads(out)
    assert report["config"]["nmax"] == 3 and report["config"]["d"] == 2
    assert report["config"]["seed"] == 4
    code, out, _ = run_main(["gap", "--config", str(cfg), "--nmax", "4"], capsys)
    report = json.loads(out)
    assert report["config"]["nmax"] == 4 and report["config"]["d"] == 2


def test_atomic_out(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, stdout, _ = run_main(["gap", "--nmax", "3", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    jsonschema.validate(json.loads(out.read_text()), SCHEMA)
    assert [p.name for p in tmp_path.iterdir()] == ["report.json"]
    csv_out = tmp_path / "gap.csv"
    run_main(["gap", "--nmax", "3", "--format", "csv", "--out", str(csv_out)], capsys)
    assert csv_out.read_text().splitlines()[0] == "n,h_upper,min_flipped,ratio"
    assert (tmp_path / "gap.csv.report.json").exists()


@pytest.mark.parametrize("args", [
    ["gap", "--nmax", "x"],
    ["gap", "--nmax", "1"],
    ["gap", "--bogus"],
    ["interp", "--dims", "2"],
    ["diamond", "--map", "swap"],
    ["diamond", "--format", "csv"],
    ["cocycle", "--degree", "1"],
    ["nope"],
    ["gap", "--seed", "-1"],
])
def test_usage_errors_exit_2(args, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(args)
    assert exc.value.code == 2


def test_cap_is_validated_before_dispatch(monkeypatch, capsys):
    monkeypatch.setenv("OPNORMLAB_CAP", "16")
    with pytest.raises(SystemExit) as exc:
        cli.main(["gap", "--nmax", "5"])
    assert exc.value.code == 2


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"restarts": 3}))
    with pytest.raises(SystemExit) as exc:
        cli.main(["gap", "--config", str(cfg)])
    assert exc.value.code == 2


def test_numerical_failure_exits_1(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise RuntimeError("solver did not converge")

    monkeypatch.setattr(cli.superop, "diamond", boom)
    code, out, _ = run_main(["diamond"], capsys)
    report = json.loads(out)
    assert code == 1
    assert "solver did not converge" in report["error"]
    jsonschema.validate(report, SCHEMA)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opnormlab", "gap", "--nmax", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "gap"
