import io
import json
import subprocess
import sys

import pytest

from raynaud.certificate import Certificate
from raynaud.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stream=out)
    return code, out.getvalue()


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_check_lift_24_fails_at_depth_2():
    code, out = call("check-lift", "--fixture", "2.4", "--p", "2")
    assert code == 1
    assert "condition (2) FAIL at depth 2" in out


def test_check_lift_23_passes():
    assert call("check-lift", "--fixture", "2.3", "--p", "2")[0] == 0


def test_certify_tango_standard():
    code, out = call("certify-tango", "--p", "2", "--n", "1", "--e", "3")
    assert code == 0 and "is 1-Tango data" in out


def test_certify_tango_from_fixture_file(in_tmp):
    (in_tmp / "c.txt").write_text("# degree 4 custom curve\n2 2 1\ncustom\n"
                                  "1*X^3*Y^1+1*X^2*Y^2+1*X^1*Z^3+1*Y^4\n")
    code, out = call("certify-tango", "--p", "2", "--n", "2", "--e", "1", "--shape", "c.txt")
    assert code == 1
    (in_tmp / "s.txt").write_text("2 1 3\n1*Y^3+1*X^1*Y^2\n")
    assert call("certify-tango", "--p", "2", "--n", "1", "--e", "3", "--shape", "s.txt")[0] == 0
    assert call("certify-tango", "--p", "2", "--n", "1", "--e", "2", "--shape", "s.txt")[0] == 3


def test_fujita_writes_certificate(in_tmp):
    code, _ = call("fujita", "--r", "3")
    assert code == 0
    cert = Certificate.from_json((in_tmp / "fujita_r3.json").read_text())
    assert cert.status.value == "PASS"
    assert cert.family["search"]["degree"] == 12


def test_fujita_multiple_and_out(in_tmp):
    code, _ = call("fujita", "--r", "1", "--r", "2", "--jobs", "2", "--out", "out/c.json")
    assert code == 0
    assert sorted(p.name for p in (in_tmp / "out").iterdir()) == ["c_r1.json", "c_r2.json"]


def test_fujita_beyond_budget_is_parameter_error():
    assert call("fujita", "--r", "8")[0] == 3
    assert call("fujita", "--r", "8", "--budget", "72")[0] == 0


def test_json_output_roundtrips(in_tmp):
    code, out = call("--json", "nonvanish", "--m", "1", "--p", "2", "--out", "nv.json")
    assert code == 0
    data = json.loads(out)
    assert list(data) == ["family", "checks", "conclusion"]
    assert Certificate.from_json(out).to_json() == (in_tmp / "nv.json").read_text().strip()


def test_surface_info_and_pushforward():
    code, out = call("surface-info", "--p", "2", "--n", "2", "--e", "5", "--l", "5")
    assert code == 0 and "K_X = (10) S~ + phi^*(153*inf)" in out
    code, out = call("pushforward", "--m", "4", "--sign", "neg", "--l", "3")
    assert code == 0 and "PicPE(-3, 12*inf)" in out


@pytest.mark.parametrize("argv", [
    ["--bogus"],
    ["nonvanish", "--m", "1", "--p", "2", "--bogus"],
    ["nonvanish", "--m", "1", "--p", "4"],
    ["surface-info", "--p", "2", "--n", "1", "--e", "3", "--l", "2"],
    ["certify-tango", "--p", "2", "--n", "1", "--e", "1"],
    ["pushforward", "--m", "1", "--sign", "up", "--l", "3"],
])
def test_usage_errors_exit_3(argv, capsys):
    assert call(*argv)[0] == 3
    assert capsys.readouterr().err


def test_precision_flag_is_scoped(monkeypatch):
    monkeypatch.delenv("RAYNAUD_PRECISION", raising=False)
    assert call("--precision", "80", "certify-tango", "--p", "2", "--n", "2", "--e", "1")[0] == 0
    import os
    assert "RAYNAUD_PRECISION" not in os.environ


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "raynaud.cli", "check-lift", "--fixture", "2.4"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "depth 2" in proc.stdout
