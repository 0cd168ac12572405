import os

import pytest
from click.testing import CliRunner

from partialgroups.cli import main
from partialgroups.formats import read

CORPUS = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir, "corpus"))


@pytest.fixture
def run(monkeypatch):
    monkeypatch.chdir(CORPUS)
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return invoke


def values(output):
    out = {}
    for line in output.splitlines():
        if line.startswith("#") or ": " not in line:
            continue
        k, v = line.split(": ", 1)
        out[k] = v
    return out


def test_check_axioms(run):
    r = run("check-axioms", "s3.pg")
    assert r.exit_code == 0
    assert "# input.0.sha256: " in r.output
    assert "FAIL" not in r.output


def test_invariants(run):
    v = values(run("invariants", "s3.pg").output)
    assert [v[f"order.{k}"] for k in ("N", "Z", "Aut", "Inn", "Out")] == ["6", "1", "6", "6", "1"]
    v = values(run("invariants", "z3").output)
    assert [v[f"order.{k}"] for k in ("N", "Z", "Aut", "Inn", "Out")] == ["3", "3", "2", "1", "2"]


def test_output_is_deterministic(run):
    a = run("--seed", "5", "invariants", "q8.pg").output
    b = run("--seed", "5", "invariants", "q8.pg").output
    assert a == b


def test_machine_format(run):
    r = run("--format", "machine", "classify-extensions", "z2", "z2")
    assert r.exit_code == 0
    lines = r.output.splitlines()
    assert all("=" in line for line in lines)
    assert "classes=2" in lines and "h2_order=2" in lines


def test_classify_inversion(run):
    v = values(run("classify-extensions", "z4", "z2", "--action", "inversion").output)
    assert v["classes"] == v["h2_order"] == "2"


def test_missing_file_exit_code(run):
    r = run("check-axioms", "missing.pg")
    assert r.exit_code == 2 and "error:" in r.output


def test_parse_error_exit_code(run, tmp_path):
    bad = tmp_path / "bad.pg"
    bad.write_text("group table 2 0 1 1\n")
    r = run("check-axioms", str(bad))
    assert r.exit_code == 2 and "line 1, column 19" in r.output


def test_goodness(run):
    r = run("goodness", "s3.ext")
    assert r.exit_code == 0 and "good: yes" in r.output
    r = run("goodness", "nonrigid.ext")
    assert r.exit_code == 1
    v = values(r.output)
    assert v["good"] == "no" and v["rigid"] == "no" and v["admissible"] == "yes"


def test_locality_from_group_writes_file(run, tmp_path):
    out = tmp_path / "s4.loc"
    r = run("locality", "from-group", "s4", "--p", "2", "--policy", "centric", "-o", str(out))
    assert r.exit_code == 0
    assert len(read(str(out)).build().delta) == 4


def test_extend_pair(run):
    r = run("extend", "z3_by_z2_inversion.pair")
    assert r.exit_code == 0 and "FAIL" not in r.output


def test_transporter_commands(run):
    assert run("transporter", "check", "s4_centric.tr", "--samples", "20").exit_code == 0
    r = run("transporter", "quotient", "s4_centric.tr", "--compare", "s4", "--p", "2",
            "--policy", "centric")
    assert r.exit_code == 0 and "yes" in values(r.output).get("isomorphic", "")


def test_fusion_and_saturation(run):
    assert run("fusion", "report", "s4_centric.loc").exit_code == 0
    assert run("saturation", "s4_centric.loc").exit_code == 0
