"""Reading and writing grids, coefficient vectors and operational matrices.

JSON is the canonical format. Floats are written with ``repr`` so a
write-read cycle is bit exact. CSV output uses 17 significant digits,
which also round-trips IEEE doubles.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from pathlib import Path

import numpy as np

from .errors import ParseError
from .jacobi import JacobiBasis
from .opmatrix import OpMatrix
from .quadrature import CoeffVector, GridFunction

__all__ = [
    "read_grid_csv",
    "parse_grid_csv",
    "coeffs_to_json",
    "coeffs_from_json",
    "coeffs_to_csv",
    "coeffs_from_csv",
    "read_coeffs",
    "parse_coeffs",
    "matrix_to_csv",
    "matrix_from_csv",
    "matrix_to_json",
    "matrix_from_json",
]

_HEADER_RE = re.compile(r"^#\s*jacfrac\s+opmatrix\s+(.*)$")


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def _parse_float(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"cannot parse {tok.strip()!r} as a number", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {tok.strip()!r}", lineno)
    return v


def read_grid_csv(path) -> GridFunction:
    return parse_grid_csv(Path(path).read_text())


def parse_grid_csv(text: str) -> GridFunction:
    """Parse ``x,y`` samples from CSV text.

    A single non-numeric header line is allowed at the top; lines starting
    with ``#`` and blank lines are ignored.
    """
    xs, ys, where = [], [], []
    seen_data = False
    for lineno, row in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 columns (x,y), found {len(row)}", lineno)
        if not seen_data and not xs:
            try:
                float(row[0]), float(row[1])
            except ValueError:
                seen_data = True  # header line
                continue
        seen_data = True
        xs.append(_parse_float(row[0], lineno))
        ys.append(_parse_float(row[1], lineno))
        where.append(lineno)
    if len(xs) < 2:
        raise ParseError("a grid needs at least 2 data rows")
    x = np.array(xs)
    bad = np.nonzero(np.diff(x) <= 0)[0]
    if bad.size:
        raise ParseError("x values must be strictly increasing", where[bad[0] + 1])
    return GridFunction(x, np.array(ys))


def _basis_dict(basis: JacobiBasis) -> dict:
    return {"a": basis.a, "b": basis.b, "beta": basis.beta, "gamma": basis.gamma}


def _basis_from(d) -> JacobiBasis:
    try:
        return JacobiBasis.on(float(d["a"]), float(d["b"]), float(d["beta"]), float(d["gamma"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"basis needs numeric a, b, beta, gamma ({exc})") from None


def coeffs_to_json(c: CoeffVector, extra: dict | None = None) -> str:
    doc = {"basis": _basis_dict(c.basis), "coeffs": [float(v) for v in c.coeffs]}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def coeffs_from_json(text: str) -> CoeffVector:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or "basis" not in doc or "coeffs" not in doc:
        raise ParseError("expected an object with 'basis' and 'coeffs'")
    coeffs = doc["coeffs"]
    if not isinstance(coeffs, list) or not coeffs:
        raise ParseError("'coeffs' must be a non-empty list")
    try:
        arr = np.array([float(v) for v in coeffs])
    except (TypeError, ValueError):
        raise ParseError("'coeffs' must contain numbers only") from None
    return CoeffVector(_basis_from(doc["basis"]), arr)


def coeffs_to_csv(c: CoeffVector) -> str:
    b = c.basis
    lines = [f"# jacfrac coeffs a={_g17(b.a)} b={_g17(b.b)} beta={_g17(b.beta)} gamma={_g17(b.gamma)}", "n,coeff"]
    lines += [f"{n},{_g17(v)}" for n, v in enumerate(c.coeffs)]
    return "\n".join(lines) + "\n"


def _header_fields(line: str, lineno: int) -> dict:
    fields = {}
    for tok in line.split()[3:]:
        if "=" not in tok:
            raise ParseError(f"bad header field {tok!r}", lineno)
        k, v = tok.split("=", 1)
        fields[k] = v
    return fields


def coeffs_from_csv(text: str) -> CoeffVector:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# jacfrac coeffs"):
        raise ParseError("missing '# jacfrac coeffs' header", 1)
    basis = _basis_from(_header_fields(lines[0], 1))
    vals = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#") or line.strip() == "n,coeff":
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError("expected 2 columns (n,coeff)", lineno)
        vals.append(_parse_float(parts[1], lineno))
    if not vals:
        raise ParseError("no coefficients found")
    return CoeffVector(basis, np.array(vals))


def read_coeffs(path) -> CoeffVector:
    return parse_coeffs(Path(path).read_text())


def parse_coeffs(text: str) -> CoeffVector:
    """Parse a coefficient vector from JSON or CSV (detected from content)."""
    if not text.strip():
        raise ParseError("empty coefficient input")
    if text.lstrip().startswith("#"):
        return coeffs_from_csv(text)
    return coeffs_from_json(text)


def _matrix_meta(M: OpMatrix) -> dict:
    return {**_basis_dict(M.basis), "alpha": M.alpha, "side": M.side, "N": M.N}


def matrix_to_csv(M: OpMatrix) -> str:
    meta = _matrix_meta(M)
    head = " ".join(
        f"{k}={v if isinstance(v, (str, int)) else _g17(v)}" for k, v in meta.items()
    )
    lines = [f"# jacfrac opmatrix {head}"]
    lines += [",".join(_g17(v) for v in row) for row in M.entries]
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str) -> OpMatrix:
    lines = text.splitlines()
    if not lines or not _HEADER_RE.match(lines[0]):
        raise ParseError("missing '# jacfrac opmatrix' header", 1)
    meta = _header_fields(lines[0], 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        rows.append([_parse_float(t, lineno) for t in line.split(",")])
    if not rows or len({len(r) for r in rows}) != 1:
        raise ParseError("matrix rows must be non-empty and of equal length")
    return OpMatrix(_basis_from(meta), float(meta["alpha"]), meta["side"], np.array(rows))


def matrix_to_json(M: OpMatrix) -> str:
    doc = {
        "basis": _basis_dict(M.basis),
        "alpha": M.alpha,
        "side": M.side,
        "N": M.N,
        "entries": [[float(v) for v in row] for row in M.entries],
    }
    return json.dumps(doc) + "\n"


def matrix_from_json(text: str) -> OpMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    try:
        return OpMatrix(_basis_from(doc["basis"]), float(doc["alpha"]), doc["side"], np.array(doc["entries"], dtype=float))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed matrix document ({exc})") from None
