import json
import subprocess
import sys

import pytest

from chiral_calc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_twist_cubic(capsys):
    code, out, _ = run(capsys, "twist", "-D", "1", "-w", "1", "-f", "x1^3")
    assert code == 0
    assert "rank: 1/3" in out and "[FAIL]" not in out


def test_cohomology_quadratic(capsys):
    code, out, _ = run(capsys, "cohomology", "-D", "1", "-w", "1", "-f", "x1^2", "--nmax", "3", "--json")
    assert code == 0
    data = json.loads(out)
    assert data[0]["values"]["nonzero"] == {"(n=0, m=0, j=0)": 1}
    slices = data[0]["values"]["cohomology"]["slices"]
    assert {"n", "m", "dims", "euler"} <= set(slices[0])


def test_override_negative_control(capsys):
    code, out, err = run(capsys, "verify-top", "-D", "2", "--override", "J=2 :phi1 psi1:")
    assert code == 1
    assert "J-J OPE" in err
    assert "[FAIL] J-J OPE" in out


def test_verify_top_passes(capsys):
    assert run(capsys, "verify-top", "-D", "3")[0] == 0


@pytest.mark.parametrize("argv", [
    ["twist", "-f", "x1^2 + x1"],
    ["twist", "-f", "x1^"],
    ["twist", "-D", "2", "-w", "1", "-f", "x1^2"],
    ["cohomology", "-f", "x1^2*x2", "-D", "2", "-w", "1,-1"],
    ["brst-suite"],
    ["verify-top", "--override", "K=x1"],
    ["eval", ":x1", "y1"],
    ["character", "-f", "x1^3", "-N", "-1"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("CHIRAL_CALC_THREADS", "zero")
    assert run(capsys, "verify-top")[0] == 2
    monkeypatch.setenv("CHIRAL_CALC_THREADS", "4")
    assert run(capsys, "verify-top")[0] == 0


def test_brst_suite(capsys):
    code, out, _ = run(capsys, "brst-suite", "-D", "2", "-w", "1,2", "-f", "x1^4 + x2^2")
    assert code == 0
    assert "d J = G_(0)f" in out


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "y1", "x1", "-n", "0")
    assert code == 0 and "product n=0: 1" in out
    code, out, _ = run(capsys, "eval", ":dx1 y1: - :phi1 dpsi1:", "x1", "--json")
    assert json.loads(out)[0]["values"]["lambda bracket"] == {"n=0": ":dx1:"}


def test_character_modes(capsys):
    code, out, _ = run(capsys, "character", "-f", "x1^3", "-N", "2")
    assert code == 0 and "localization = direct" in out
    code, out, _ = run(capsys, "character", "-f", "x1^3", "-N", "2", "--mode", "localization", "--literal")
    assert code == 1 and "pole" in out
    code, out, _ = run(capsys, "character", "-f", "x1^2", "-N", "2", "--mode", "direct", "--json")
    series = json.loads(out)[0]["values"]["series"]
    assert series["terms"] == [{"q": 0, "coeff": [{"u": 0, "t": 0, "c": "1"}]}]


def test_bv_and_show_currents(capsys):
    code, out, _ = run(capsys, "bv", "-f", "x1^2", "--nmax", "1")
    assert code == 0 and "classical BV rank: 1" in out
    code, out, _ = run(capsys, "show-currents", "-D", "1")
    assert code == 0 and "L: :y1 dx1: - :phi1 dpsi1:" in out


def test_cache_flag(tmp_path, capsys):
    argv = ["cohomology", "-f", "x1^3", "--nmax", "1", "--cache", str(tmp_path / "c")]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0
    assert any((tmp_path / "c").iterdir())


def test_output_is_byte_identical():
    cmd = [sys.executable, "-m", "chiral_calc.cli", "cohomology", "-f", "x1^3", "--nmax", "2", "--json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
