import json
import math
import subprocess
import sys

import numpy as np
import pytest

from jacfrac import io
from jacfrac.cli import main
from jacfrac.jacobi import JacobiBasis
from jacfrac.quadrature import CoeffVector

SQRT_PI = math.sqrt(math.pi)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_coeffs(path, basis, values):
    path.write_text(io.coeffs_to_json(CoeffVector(basis, values)))
    return str(path)


def test_transform_one(capsys):
    code, out, _ = run(capsys, "transform", "--builtin", "one", "--n", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["basis"] == {"a": 0.0, "b": 1.0, "beta": 0.0, "gamma": 0.0}
    np.testing.assert_allclose(doc["coeffs"], [1, 0, 0, 0, 0], atol=1e-12)


def test_transform_power2_parity(capsys):
    code, out, _ = run(capsys, "transform", "--builtin", "power:2", "--a", "-1", "--b", "1", "--n", "6")
    c = np.array(json.loads(out)["coeffs"])
    # (x+1)^2 = x^2 + 2x + 1 has components on p_0, p_1 and p_2 only
    assert code == 0 and np.sum(np.abs(c) > 1e-12) == 3
    np.testing.assert_allclose(c[3:], 0, atol=1e-12)


def test_transform_grid_csv(capsys, tmp_path):
    x = np.linspace(0, 1, 12)
    p = tmp_path / "g.csv"
    p.write_text("x,y\n" + "".join(f"{u!r},{1 + 2 * u!r}\n" for u in x.tolist()))
    code, out, _ = run(capsys, "transform", "--in", str(p), "--n", "3", "--format", "csv")
    assert code == 0 and out.startswith("# jacfrac coeffs")
    c = io.coeffs_from_csv(out).coeffs
    np.testing.assert_allclose(c, [2.0, 1 / math.sqrt(3), 0, 0], atol=1e-12)


def test_transform_malformed_csv(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n0,1\n0.5,oops\n1,2\n")
    code, _, err = run(capsys, "transform", "--in", str(p), "--n", "3")
    assert code == 2 and "line 3" in err


def test_transform_usage_errors(capsys):
    assert run(capsys, "transform", "--n", "3")[0] == 2
    assert run(capsys, "transform", "--builtin", "sinc", "--n", "3")[0] == 2
    assert run(capsys, "transform", "--builtin", "one")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "transform", "--builtin", "one", "--n", "3", "--b", "-1")[0] == 3


def test_matrix_identity_csv(capsys):
    code, out, _ = run(capsys, "matrix", "--alpha", "0", "--n", "5", "--format", "csv")
    assert code == 0
    M = io.matrix_from_csv(out)
    np.testing.assert_array_equal(M.entries, np.eye(6))


def test_matrix_anchor_and_reflection(capsys):
    _, out, _ = run(capsys, "matrix", "--alpha", "0.5", "--n", "4")
    assert json.loads(out)["entries"][0][0] == pytest.approx(4 / (3 * SQRT_PI), abs=1e-12)
    args = ["--a", "-1", "--b", "2", "--beta", "0.5", "--gamma", "0.5", "--n", "6"]
    L = io.matrix_from_json(run(capsys, "matrix", *args)[1]).entries
    R = io.matrix_from_json(run(capsys, "matrix", *args, "--side", "right")[1]).entries
    J = np.diag((-1.0) ** np.arange(7))
    assert np.max(np.abs(R - J @ L @ J)) <= 1e-8


def test_fracint(capsys, tmp_path):
    src = write_coeffs(tmp_path / "psi.json", JacobiBasis.on(0, 1), [1.0, 0, 0, 0])
    code, out, _ = run(capsys, "fracint", "--in", src, "--alpha", "0.5")
    assert code == 0
    assert json.loads(out)["coeffs"][0] == pytest.approx(4 / (3 * SQRT_PI), abs=1e-12)


def test_fracint_zero_order_is_byte_identical(capsys, tmp_path):
    src = write_coeffs(tmp_path / "psi.json", JacobiBasis.on(-1, 2, 0.25, 0.0), [0.1, 1 / 3, -2e-300, 7.0])
    outp = tmp_path / "out.json"
    code, _, _ = run(capsys, "fracint", "--in", src, "--alpha", "0", "--out", str(outp))
    assert code == 0
    assert outp.read_text() == (tmp_path / "psi.json").read_text()


def test_scope_warning_keeps_exit_zero(capsys, tmp_path):
    src = write_coeffs(tmp_path / "psi.json", JacobiBasis.on(0, 1, 0.8, 0.0), [1.0, 0.5])
    code, out, err = run(capsys, "fracint", "--in", src)
    assert code == 0 and json.loads(out)["coeffs"]
    assert "outside Lemma 1 admissibility window" in err


def test_fracder_and_errors(capsys, tmp_path):
    src = write_coeffs(tmp_path / "f.json", JacobiBasis.on(0, 1, -0.5, 0.0), [1.0, 0.5])
    code, _, err = run(capsys, "fracder", "--in", src, "--alpha", "0.75")
    assert code == 3 and "alpha + beta + 1" in err
    assert run(capsys, "fracder", "--in", src, "--alpha", "1.5")[0] == 3
    assert run(capsys, "fracder", "--in", str(tmp_path / "missing.json"))[0] == 2
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert run(capsys, "fracder", "--in", str(empty))[0] == 2


def test_abel_round_trip(capsys, tmp_path):
    from jacfrac.fracops import apply_coeff

    b = JacobiBasis.on(0, 1)
    f = apply_coeff(CoeffVector(b, np.eye(25)[2]), 0.5, N_out=128)
    src = tmp_path / "f.json"
    src.write_text(io.coeffs_to_json(f))
    code, out, _ = run(capsys, "abel", "--in", str(src), "--alpha", "0.5", "--n", "24")
    doc = json.loads(out)
    assert code == 0 and doc["residual"]["coeff"] <= 1e-6
    np.testing.assert_allclose(doc["coeffs"][:17], np.eye(25)[2][:17], atol=1e-6)


def test_abel_empty_input(capsys, tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    assert run(capsys, "abel", "--in", str(p))[0] == 2


def test_diagnose_power_law(capsys, tmp_path):
    m = np.arange(61, dtype=float)
    c = np.concatenate([[1.0], m[1:] ** -1.0])
    src = write_coeffs(tmp_path / "c.json", JacobiBasis.on(0, 1), c)
    code, out, _ = run(capsys, "diagnose", "--in", src, "--q", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["decay"]["regime"] == "bounded-q"
    assert doc["decay"]["q_bound"] == pytest.approx(4.0, abs=1e-6)
    assert doc["zm_condition"]["convergent"] is True
    assert doc["basis_range"] == {"M": 4 / 3, "m": 4.0}
    short = write_coeffs(tmp_path / "s.json", JacobiBasis.on(0, 1), [1.0, 0.5, 0.25])
    assert run(capsys, "diagnose", "--in", short)[0] == 3


def test_stability_cap(capsys, monkeypatch):
    code, _, err = run(capsys, "matrix", "--n", "40", "--precision", "double")
    assert code == 3 and "stability cap" in err
    monkeypatch.setenv("JACFRAC_MAX_N", "50")
    code, _, err = run(capsys, "matrix", "--n", "40", "--precision", "double", "--alpha", "0")
    assert code == 0 and "unverified accuracy: stability cap overridden to N = 50" in err


def test_selfcheck_passes_and_is_deterministic(capsys):
    code1, out1, _ = run(capsys, "selfcheck")
    code2, out2, _ = run(capsys, "selfcheck")
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.count("PASS") == 4


def test_selfcheck_detects_sign_flip(capsys, monkeypatch):
    monkeypatch.setenv("JACFRAC_SELFCHECK_MUTATE", "1")
    code, out, _ = run(capsys, "selfcheck")
    assert code == 4
    assert "FAIL  symmetry" in out


def test_console_script_determinism(tmp_path):
    cmd = [sys.executable, "-m", "jacfrac", "matrix", "--alpha", "0.25", "--beta", "0.5", "--n", "8", "--format", "csv"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout.startswith(b"# jacfrac opmatrix")
