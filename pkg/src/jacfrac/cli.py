"""Command-line interface: ``jacfrac <command> [flags]``.

Exit codes: 0 success (warnings allowed), 2 input error, 3 precondition
error, 4 numerical failure. Warnings are printed to stderr and never alter
the numeric output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import abel, io, opmatrix
from .errors import (
    BasisMismatchError,
    DegenerateFitError,
    DomainError,
    IndexRangeError,
    InterpolationError,
    JacfracError,
    NonConvergenceError,
    ParseError,
    ResourceError,
)
from .fracops import FracOrder, apply_coeff, in_scope
from .jacobi import JacobiBasis, basis_range
from .quadrature import CoeffVector, analyze

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_NUMERICAL = 0, 2, 3, 4


class InputError(Exception):
    """Bad command-line usage or unreadable input."""


@dataclass(frozen=True)
class JobConfig:
    command: str
    basis: JacobiBasis
    alpha: float
    side: str
    N: int | None
    input: str | None
    builtin: str | None
    output: str | None
    format: str
    precision: str
    q: float
    window: tuple[int, int] | None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> JobConfig:
        window = None
        if getattr(ns, "window", None):
            try:
                lo, hi = (int(v) for v in ns.window.split(":"))
            except ValueError:
                raise InputError(f"--window must look like LO:HI, got {ns.window!r}") from None
            window = (lo, hi)
        return cls(
            command=ns.command,
            basis=JacobiBasis.on(ns.a, ns.b, ns.beta, ns.gamma),
            alpha=ns.alpha,
            side=ns.side,
            N=ns.n,
            input=ns.input,
            builtin=getattr(ns, "builtin", None),
            output=ns.out,
            format=ns.format,
            precision=ns.precision,
            q=getattr(ns, "q", 2.0),
            window=window,
        )


# ---------------------------------------------------------------------------
# helpers


def _builtin(name: str, basis: JacobiBasis):
    a = basis.a
    if name == "one":
        return lambda x: np.ones_like(x)
    if name == "exp":
        return np.exp
    if name == "runge":
        return lambda x: 1.0 / (1.0 + 25.0 * basis.to_reference(x) ** 2)
    if name.startswith("power:"):
        try:
            mu = float(name.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad power exponent in {name!r}") from None
        if mu <= -1:
            raise DomainError(f"power exponent must exceed -1, got {mu}")
        return lambda x: np.maximum(x - a, 0.0) ** mu
    raise InputError(f"unknown builtin {name!r} (one, power:MU, runge, exp)")


def _emit(text: str, cfg: JobConfig) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _coeff_text(c: CoeffVector, cfg: JobConfig, extra: dict | None = None) -> str:
    if cfg.format == "csv":
        if extra:
            raise InputError("this command only supports --format json")
        return io.coeffs_to_csv(c)
    return io.coeffs_to_json(c, extra)


def _read_input_coeffs(cfg: JobConfig) -> CoeffVector:
    if not cfg.input:
        raise InputError("--in is required")
    try:
        text = Path(cfg.input).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {cfg.input}: {exc.strerror}") from None
    return io.parse_coeffs(text)


def _check_cap(N: int, cfg: JobConfig) -> None:
    if cfg.precision != "double":
        return
    cap = opmatrix.stability_cap()
    if N > cap:
        raise IndexRangeError(
            f"N = {N} exceeds the double-precision stability cap {cap}; "
            "use --precision auto or set JACFRAC_MAX_N"
        )


def _report_dict(rep: abel.DecayReport) -> dict:
    return {
        "lambda_hat": rep.lambda_hat,
        "s": rep.s,
        "q_bound": None if rep.q_bound is None else (rep.q_bound if math.isfinite(rep.q_bound) else "inf"),
        "regime": rep.regime,
        "fit_range": list(rep.fit_range),
        "fit_residual": rep.fit_residual,
        "skipped": list(rep.skipped),
    }


# ---------------------------------------------------------------------------
# commands


def cmd_transform(cfg: JobConfig) -> int:
    if cfg.N is None or cfg.N < 1:
        raise InputError("--n must be given and at least 1")
    if bool(cfg.input) == bool(cfg.builtin):
        raise InputError("give exactly one of --in and --builtin")
    if cfg.builtin:
        f = _builtin(cfg.builtin, cfg.basis)
    else:
        try:
            f = io.read_grid_csv(cfg.input)
        except OSError as exc:
            raise InputError(f"cannot read {cfg.input}: {exc.strerror}") from None
    c = analyze(f, cfg.basis, cfg.N)
    _emit(_coeff_text(c, cfg), cfg)
    return EXIT_OK


def cmd_matrix(cfg: JobConfig) -> int:
    N = 10 if cfg.N is None else cfg.N
    _check_cap(N, cfg)
    M = opmatrix.assemble(cfg.basis, cfg.alpha, cfg.side, N, precision=cfg.precision)
    _emit(io.matrix_to_csv(M) if cfg.format == "csv" else io.matrix_to_json(M), cfg)
    return EXIT_OK


def _apply(cfg: JobConfig, kind: str) -> int:
    psi = _read_input_coeffs(cfg)
    N_out = psi.N if cfg.N is None else cfg.N
    _check_cap(max(N_out, psi.N), cfg)
    order = FracOrder(cfg.alpha, kind)
    if order.alpha == 0:
        out = apply_coeff(psi, order, cfg.side, N_out)
    else:
        M = opmatrix.assemble(psi.basis, order.signed, cfg.side, N_out, n_cols=psi.N, precision=cfg.precision)
        out = apply_coeff(psi, order, cfg.side, N_out, matrix=M)
    _emit(_coeff_text(out, cfg), cfg)
    return EXIT_OK


def cmd_fracint(cfg: JobConfig) -> int:
    return _apply(cfg, "integral")


def cmd_fracder(cfg: JobConfig) -> int:
    return _apply(cfg, "derivative")


def cmd_abel(cfg: JobConfig) -> int:
    f = _read_input_coeffs(cfg)
    N = f.N if cfg.N is None else cfg.N
    _check_cap(max(N, f.N), cfg)
    psi = abel.solve(f, cfg.alpha, N)
    res = abel.residual(f, psi, cfg.alpha)
    try:
        decay = _report_dict(abel.estimate_decay(psi, cfg.window))
    except (DegenerateFitError, DomainError) as exc:
        decay = {"error": str(exc)}
    extra = {"decay": decay, "residual": {"coeff": res.coeff, "pointwise": res.pointwise}}
    _emit(io.coeffs_to_json(psi, extra), cfg)
    return EXIT_OK


def cmd_diagnose(cfg: JobConfig) -> int:
    c = _read_input_coeffs(cfg)
    rep = abel.estimate_decay(c, cfg.window)
    zm = abel.zm_condition(c, cfg.q, rep.lambda_hat)
    b = c.basis
    try:
        br = basis_range(b.beta, b.gamma)
        window = {"M": br.M_lower, "m": br.m_upper if math.isfinite(br.m_upper) else "inf"}
    except DomainError as exc:
        window = {"error": str(exc)}
    doc = {
        "decay": _report_dict(rep),
        "zm_condition": {"q": cfg.q, "omega": zm.omega, "exponent": zm.exponent, "convergent": zm.convergent},
        "basis_range": window,
        "lemma1_scope": in_scope(b),
    }
    _emit(json.dumps(doc, indent=2) + "\n", cfg)
    return EXIT_OK


def selfcheck_suites() -> list[tuple[str, bool, str]]:
    """Reduced-size property checks; returns (name, passed, detail) rows."""
    out = []
    leg = JacobiBasis((0.0, 1.0))
    bases = [leg, JacobiBasis((-1.0, 1.0), 0.5, 0.5), JacobiBasis((2.0, 3.5), -0.5, 0.0)]

    err = max(np.abs(opmatrix.assemble(b, 0.0, "left", 10).entries - np.eye(11)).max() for b in bases)
    out.append(("identity at alpha=0", err <= 1e-8, f"max error {err:.3e}"))

    worst = 0.0
    for b in bases:
        for al in (0.5, -0.25):
            A = opmatrix.assemble(b, al, "left", 6).entries
            O = opmatrix.oracle_block(b, al, "left", 6)
            worst = max(worst, float(np.max(np.abs(A - O) / np.maximum(1e-8, 1e-12 * np.abs(O)))))
    out.append(("oracle equivalence", worst <= 1.0, f"max scaled error {worst:.3e}"))

    rep = opmatrix.check_ultraspherical_symmetry(JacobiBasis((-1.0, 1.0)), 0.5, 10)
    out.append(("symmetry (Legendre)", rep.max_asymmetry <= 1e-8, f"max asymmetry {rep.max_asymmetry:.3e}"))

    psi = CoeffVector(leg, 0.5 ** np.arange(25))
    f = apply_coeff(psi, 0.5, "left", 128)
    back = abel.solve(f, 0.5, 24)
    rt = float(np.max(np.abs(back.coeffs[:16] - psi.coeffs[:16])))
    out.append(("round trip (alpha=0.5)", rt <= 1e-6, f"max error {rt:.3e}"))
    return out


def cmd_selfcheck(cfg: JobConfig) -> int:
    flip = os.environ.get("JACFRAC_SELFCHECK_MUTATE")
    old = opmatrix._DHAT_SIGN_FLIP
    opmatrix._DHAT_SIGN_FLIP = int(flip) if flip else None
    try:
        rows = selfcheck_suites()
    finally:
        opmatrix._DHAT_SIGN_FLIP = old
    for name, ok, detail in rows:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}\n")
    return EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_NUMERICAL


COMMANDS = {
    "transform": (cmd_transform, "expand a function or sampled data in the Jacobi basis"),
    "matrix": (cmd_matrix, "export the signed operational matrix"),
    "fracint": (cmd_fracint, "apply a fractional integral to a coefficient file"),
    "fracder": (cmd_fracder, "apply a fractional derivative to a coefficient file"),
    "abel": (cmd_abel, "solve the Abel equation for a coefficient file"),
    "diagnose": (cmd_diagnose, "decay fit, summability test and basis window"),
    "selfcheck": (cmd_selfcheck, "run reduced-size property checks"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=0.0, help="left endpoint (default 0)")
    common.add_argument("--b", type=float, default=1.0, help="right endpoint (default 1)")
    common.add_argument("--beta", type=float, default=0.0, help="weight exponent at a")
    common.add_argument("--gamma", type=float, default=0.0, help="weight exponent at b")
    common.add_argument("--alpha", type=float, default=0.5, help="operator order")
    common.add_argument("--side", choices=("left", "right"), default="left")
    common.add_argument("--n", type=int, default=None, help="truncation index N")
    common.add_argument("--in", dest="input", default=None, help="input file")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--precision", choices=("auto", "double"), default="auto")
    common.add_argument("--builtin", default=None, help="one, power:MU, runge or exp")
    common.add_argument("--q", type=float, default=2.0, help="exponent for the summability test")
    common.add_argument("--window", default=None, help="decay fit window LO:HI")

    parser = argparse.ArgumentParser(prog="jacfrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (InputError, ParseError, InterpolationError, OSError)):
        return EXIT_INPUT
    if isinstance(exc, (DomainError, IndexRangeError, BasisMismatchError, ResourceError)):
        return EXIT_PRECONDITION
    if isinstance(exc, (NonConvergenceError, DegenerateFitError, JacfracError, ArithmeticError)):
        return EXIT_NUMERICAL
    raise exc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if "JACFRAC_MAX_N" in os.environ:
        sys.stderr.write(
            f"unverified accuracy: stability cap overridden to N = {os.environ['JACFRAC_MAX_N']}\n"
        )
    handler = COMMANDS[ns.command][0]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = handler(JobConfig.from_args(ns))
        except Exception as exc:  # mapped to exit codes below
            code = _exit_code(exc)
            sys.stderr.write(f"error: {exc}\n")
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
