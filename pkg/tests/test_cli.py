import csv
import io
import json
import subprocess
import sys

import pytest

from halfheat import cli
from halfheat.cli import COLUMNS


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_identities_csv(capsys):
    code, out, err = run(capsys, "verify-identities")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == COLUMNS["verify-identities"]
    assert len(rows) == 14
    assert all(r[1] == "PASS" for r in rows[1:])


def test_density_example(capsys):
    code, out, _ = run(capsys, "density", "--surface", "right_helicoid", "--r", "0.5,1,2", "--order", "96",
                       "--n-points", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == COLUMNS["density"]
    assert [float(r["r"]) for r in rows] == [0.5, 1.0, 2.0]
    assert all(abs(float(r["density"]) - 0.5) < 1e-9 for r in rows)


def test_invariants_json_example(capsys):
    code, out, _ = run(capsys, "invariants", "--surface", "catenoid", "--point", "0,0", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["columns"] == COLUMNS["invariants"]
    assert doc["meta"]["command"] == "invariants"
    assert len(doc["meta"]["config_hash"]) == 16
    assert doc["meta"]["kernel_backend"] in ("cython", "python")
    row = doc["rows"][0]
    assert row["gamma4"] == pytest.approx(1.25, rel=1e-10)
    assert row["div_residual"] == pytest.approx(4.0, rel=1e-10)


@pytest.mark.parametrize("cmd", ["surface-report", "invariants", "heat", "symmetry-check"])
def test_headers(capsys, cmd, tmp_path):
    extra = ["--t", "0.5", "--point", "0.4,0.3"] if cmd == "heat" else []
    surf = "clifford_torus" if cmd == "symmetry-check" else "right_helicoid"
    out_path = tmp_path / "out.csv"
    code, stdout, _ = run(capsys, cmd, "--surface", surf, "--u-count", "2", "--v-count", "2",
                          "--output", str(out_path), *extra)
    assert code == 0
    rows = list(csv.reader(out_path.open()))
    assert rows[0] == COLUMNS[cmd]
    assert len(rows) > 1


def test_deterministic_output(capsys, tmp_path):
    argv = ["density", "--surface", "catenoid", "--r", "0.5,1", "--n-points", "2"]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert cli.main(argv + ["--output", str(a)]) == 0
    assert cli.main(argv + ["--output", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_summary_routing(capsys, tmp_path):
    code, out, err = run(capsys, "verify-identities")
    assert out.startswith("identity,") and err
    code, out, err = run(capsys, "verify-identities", "--output", str(tmp_path / "x.csv"))
    assert out and not out.startswith("identity,")


def test_symmetry_all(capsys):
    code, out, _ = run(capsys, "symmetry-check", "--surface", "all")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) >= 6 and all(r["passed"] == "true" for r in rows)


def test_acceptance_subset(capsys):
    code, out, _ = run(capsys, "acceptance", "--only", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert {r["criterion"] for r in doc["rows"]} == {4}


@pytest.mark.parametrize("argv", [
    ["density", "--surface", "moebius"],
    ["density", "--surface", "hyperbolic_helicoid"],
    ["density", "--r", "-1"],
    ["density", "--output", "/nonexistent/dir/out.csv"],
    ["density", "--point", "0,0", "--surface", "spherical_helicoid", "--alpha", "0.5"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["density", "--r", "abc"])
    assert e.value.code == 2


def test_failure_exits_1(capsys, monkeypatch):
    from halfheat import acceptance

    def failing():
        return acceptance.CriterionResult(4, "stub", [acceptance.Check("stub", 1.0, 0.5, False, "")], 0.0)

    monkeypatch.setitem(acceptance.CRITERIA, 4, failing)
    code, out, _ = run(capsys, "acceptance", "--only", "4")
    assert code == 1
    assert "false" in out


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "halfheat", "verify-identities", "--format", "json"],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0
    assert json.loads(p.stdout)["passed"]
