import csv
import json
import subprocess
import sys

import pytest

from iqpro.cli import SCHEMA_KEYS, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--disc", "-3", "--prime", "3")
    assert code == 0
    assert "Case2a" in out and "d_k = 2" in out and "[G,G]^ab = Lambda" in out


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--disc", "-84", "--prime", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["relation_rank"] == 1
    assert list(data)[: len(SCHEMA_KEYS)] == list(SCHEMA_KEYS)
    assert json.dumps(data, indent=2, ensure_ascii=False) + "\n" == out


def test_invalid_input(capsys):
    assert run(capsys, "classify", "--disc", "-10", "--prime", "3")[0] == 2
    assert run(capsys, "classify", "--disc", "-12", "--prime", "3")[0] == 2
    assert run(capsys, "classify", "--disc", "-4", "--prime", "4")[0] == 2
    assert run(capsys, "classify", "--prime", "3")[0] == 2
    assert run(capsys, "classify", "--radicand", "-12", "--prime", "3")[0] == 2
    assert run(capsys, "lambda", "--poly", "S/2")[0] == 2
    assert run(capsys, "lambda", "--poly", "1+S", "--mode", "quotient")[0] == 2
    assert run(capsys, "sweep", "--dmin", "-3", "--dmax", "-50", "--prime", "3", "--out", "x.csv")[0] == 2


def test_radicand(capsys):
    code, out, _ = run(capsys, "classify", "--radicand", "-10", "--prime", "3")
    assert code == 0 and "D = -40" in out


@pytest.mark.parametrize("D,needle", [("-4", "[ok] d_k"), ("-84", "tors: Z/3 = Z/3"), ("-23", "[ok] delta_k")])
def test_verify(capsys, D, needle):
    code, out, _ = run(capsys, "verify", "--disc", D, "--prime", "3")
    assert code == 0 and needle in out


def test_verify_failure_exit(capsys, monkeypatch):
    import iqpro.cli as cli
    from iqpro.classifier import Check

    real = cli.invariants_report

    def broken(*a, **k):
        r = real(*a, **k)
        object.__setattr__(r, "verification", (Check("d_k", False, "forced"),))
        return r

    monkeypatch.setattr(cli, "invariants_report", broken)
    assert run(capsys, "verify", "--disc", "-4", "--prime", "3")[0] == 1


def test_internal_error_exit(capsys, monkeypatch):
    import iqpro.cli as cli
    from iqpro.localunits import InternalConsistencyError

    def boom(*a, **k):
        raise InternalConsistencyError("forced")

    monkeypatch.setattr(cli, "invariants_report", boom)
    assert run(capsys, "classify", "--disc", "-4", "--prime", "3")[0] == 3


@pytest.mark.parametrize("argv,expect", [
    (["--poly", "S", "--mode", "weierstrass"], "mu=0 lambda=1"),
    (["--poly", "T+S^2", "--mode", "quotient"], "quotient_is_Zp=false"),
    (["--poly", "T+S", "--mode", "quotient"], "quotient_is_Zp=true"),
    (["--poly", "(1+S)^3-1", "--prime", "3", "--mode", "weierstrass"], "mu=0 lambda=3"),
])
def test_lambda(capsys, argv, expect):
    code, out, _ = run(capsys, "lambda", *argv)
    assert code == 0 and expect in out


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_sweep_count_and_header(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(capsys, "sweep", "--dmin", "-50", "--dmax", "-3", "--prime", "3", "--out", str(out))[0] == 0
    rows = read_rows(out)
    assert tuple(rows[0]) == SCHEMA_KEYS
    assert len(rows) == 16
    assert [int(r[0]) for r in rows[1:]] == sorted((int(r[0]) for r in rows[1:]), key=abs)


def test_sweep_empty(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert run(capsys, "sweep", "--dmin", "-2", "--dmax", "-1", "--prime", "3", "--out", str(out))[0] == 0
    assert out.read_text() == ",".join(SCHEMA_KEYS) + "\n"


def test_sweep_resume(tmp_path, capsys):
    full = tmp_path / "full.csv"
    part = tmp_path / "part.csv"
    run(capsys, "sweep", "--dmin", "-40", "--dmax", "-3", "--prime", "3", "--out", str(full))
    lines = full.read_text().splitlines(keepends=True)
    part.write_text("".join(lines[:5]) + lines[5][:10])  # interrupted mid-row
    run(capsys, "sweep", "--dmin", "-40", "--dmax", "-3", "--prime", "3", "--out", str(part))
    assert part.read_text() == full.read_text()
    # rerun is a no-op
    code, out, _ = run(capsys, "sweep", "--dmin", "-40", "--dmax", "-3", "--prime", "3", "--out", str(full))
    assert code == 0 and "0 computed" in out


def test_sweep_jobs_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "sweep", "--dmin", "-60", "--dmax", "-3", "--prime", "5", "--out", str(a), "--jobs", "1")
    run(capsys, "sweep", "--dmin", "-60", "--dmax", "-3", "--prime", "5", "--out", str(b), "--jobs", "3")
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "iqpro", "lambda", "--poly", "S"], capture_output=True, text=True)
    assert res.returncode == 0 and "lambda=1" in res.stdout
