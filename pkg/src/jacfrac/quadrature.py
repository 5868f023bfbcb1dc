"""Gauss-Jacobi quadrature, analysis/synthesis transforms and weighted L_p norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.linalg import eigh_tridiagonal
from scipy import special as sp

from .errors import (
    BasisMismatchError,
    DomainError,
    InterpolationError,
    NonConvergenceError,
    ResourceError,
)
from .jacobi import JacobiBasis, _check_x, eval_all

__all__ = [
    "MAX_ORDER",
    "QuadratureRule",
    "CoeffVector",
    "GridFunction",
    "gauss_jacobi",
    "analyze",
    "synthesize",
    "weighted_lp_norm",
]

MAX_ORDER = 512


@lru_cache(maxsize=256)
def _reference_rule(A: float, B: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Golub-Welsch nodes/weights on [-1, 1] for weight (1-t)^A (1+t)^B."""
    basis = JacobiBasis.on(-1.0, 1.0, beta=B, gamma=A)
    diag, off = basis.recurrence(N)
    if N == 1:
        t, V = np.array([diag[0]]), np.ones((1, 1))
    else:
        t, V = eigh_tridiagonal(diag[:N], off[: N - 1])
    mu0 = 2.0 ** (A + B + 1) * math.exp(sp.betaln(A + 1, B + 1))
    w = mu0 * V[0, :] ** 2
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


@dataclass(frozen=True)
class QuadratureRule:
    """N-point Gauss rule for ∫ g(x) ω(x) dx on the basis interval."""

    basis: JacobiBasis
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, g: Callable) -> float:
        return float(np.dot(self.weights, g(self.nodes)))


def gauss_jacobi(basis: JacobiBasis, N: int, max_order: int = MAX_ORDER) -> QuadratureRule:
    """N-point Gauss-Jacobi rule for ``basis``, exact to degree 2N-1."""
    if N < 1:
        raise DomainError(f"quadrature order must be >= 1, got {N}")
    if N > max_order:
        raise ResourceError(f"quadrature order {N} exceeds the maximum {max_order}")
    t, w = _reference_rule(basis.gamma, basis.beta, N)
    half = 0.5 * basis.length
    nodes = basis.from_reference(t)
    weights = w * half ** (basis.beta + basis.gamma + 1)
    return QuadratureRule(basis, nodes, weights, N)


@dataclass(frozen=True)
class CoeffVector:
    """Truncated Jacobi coefficients f_0..f_N of a function on ``basis``."""

    basis: JacobiBasis
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            raise DomainError("a coefficient vector needs at least one entry")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    def __len__(self) -> int:
        return self.coeffs.size

    def __call__(self, x):
        return synthesize(self, x)

    def truncated(self, N: int) -> CoeffVector:
        """Leading block of length N+1, zero-padded if needed."""
        out = np.zeros(N + 1)
        k = min(N + 1, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return CoeffVector(self.basis, out)

    def _check_same(self, other: CoeffVector):
        if other.basis != self.basis:
            raise BasisMismatchError("coefficient vectors live on different bases")

    def __add__(self, other: CoeffVector) -> CoeffVector:
        self._check_same(other)
        n = max(len(self), len(other))
        return CoeffVector(self.basis, self.truncated(n - 1).coeffs + other.truncated(n - 1).coeffs)

    def __sub__(self, other: CoeffVector) -> CoeffVector:
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> CoeffVector:
        return CoeffVector(self.basis, float(scalar) * self.coeffs)

    __rmul__ = __mul__


@dataclass(frozen=True)
class GridFunction:
    """Sampled data (x_i, y_i) with strictly increasing x."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).ravel()
        y = np.array(self.y, dtype=float).ravel()
        if x.size != y.size:
            raise DomainError("x and y must have equal length")
        if x.size < 2:
            raise DomainError("a grid function needs at least 2 samples")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("samples must be finite")
        if np.any(np.diff(x) <= 0):
            raise DomainError("sample abscissae must be strictly increasing")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def interpolant(self) -> Callable:
        return BarycentricInterpolator(self.x, self.y)


FunctionLike = Union[Callable, GridFunction]


def analyze(f: FunctionLike, basis: JacobiBasis, N: int, order: int | None = None) -> CoeffVector:
    """Jacobi coefficients f_n = ∫ f p_n ω dx for n = 0..N.

    The rule has ``order`` nodes (default 2N, never fewer than N+1). Sampled
    input is interpolated by a barycentric polynomial through all samples,
    which is only sensible for clean data on well-spread grids.
    """
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")
    if isinstance(f, GridFunction):
        if f.x[0] < basis.a or f.x[-1] > basis.b:
            raise DomainError("grid samples extend outside the basis interval")
        if f.x.size < N + 1:
            raise InterpolationError(
                f"{f.x.size} samples cannot determine {N + 1} coefficients"
            )
        f = f.interpolant()
    order = max(order or 2 * N, N + 1, 1)
    rule = gauss_jacobi(basis, order)
    vals = np.asarray(f(rule.nodes), dtype=float)
    P = eval_all(basis, N, rule.nodes)
    return CoeffVector(basis, P @ (rule.weights * vals))


def synthesize(c: CoeffVector, x):
    """Partial sum Σ c_n p_n(x) by Clenshaw's backward recurrence."""
    basis = c.basis
    x = _check_x(basis, x)
    t = basis.to_reference(x)
    coeffs = c.coeffs
    N = coeffs.size - 1
    diag, off = basis.recurrence(max(N, 1))
    # p_{n+1} = (t - diag[n])/off[n] p_n - off[n-1]/off[n] p_{n-1}
    y1 = np.zeros_like(t)
    y2 = np.zeros_like(t)
    for n in range(N, -1, -1):
        a_n = (t - diag[n]) / off[n]
        b_n1 = -off[n] / off[n + 1] if n + 1 <= N else 0.0
        y1, y2 = coeffs[n] + a_n * y1 + b_n1 * y2, y1
    out = basis.p0() * y1
    return out if np.ndim(out) else float(out)


def _panel(g, basis: JacobiBasis, lo: float, hi: float, left: bool, right: bool, n: int) -> float:
    # Endpoint weight factors stay inside the rule when the panel touches a or b.
    pb = JacobiBasis.on(lo, hi, basis.beta if left else 0.0, basis.gamma if right else 0.0)
    rule = gauss_jacobi(pb, n)
    x = rule.nodes
    vals = g(x)
    if not left:
        vals = vals * (x - basis.a) ** basis.beta
    if not right:
        vals = vals * (basis.b - x) ** basis.gamma
    return float(np.dot(rule.weights, vals))


def weighted_lp_norm(
    f: Callable,
    basis: JacobiBasis,
    p: float,
    tol: float = 1e-12,
    max_depth: int = 40,
    nodes_per_panel: int = 24,
) -> float:
    """(∫ |f|^p ω dx)^(1/p) by adaptive Gauss-Jacobi panels.

    Raises
    ------
    NonConvergenceError
        If a panel still fails the bisection test after ``max_depth`` splits.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")

    def g(x):
        return np.abs(np.asarray(f(x), dtype=float)) ** p

    L = basis.length
    whole = _panel(g, basis, basis.a, basis.b, True, True, nodes_per_panel)
    # Explicit stack keeps deep refinement off the Python call stack.
    stack = [(basis.a, basis.b, True, True, whole, 0)]
    total = []
    scale = abs(whole)
    while stack:
        lo, hi, left, right, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        e1 = _panel(g, basis, lo, mid, left, False, nodes_per_panel)
        e2 = _panel(g, basis, mid, hi, False, right, nodes_per_panel)
        scale = max(scale, abs(e1 + e2))
        if abs(e1 + e2 - est) <= max(tol * scale * (hi - lo) / L, 1e-300):
            total.append(e1 + e2)
            continue
        if depth >= max_depth:
            raise NonConvergenceError(
                f"adaptive L_p quadrature did not converge on [{lo}, {hi}]"
            )
        stack.append((lo, mid, left, False, e1, depth + 1))
        stack.append((mid, hi, False, right, e2, depth + 1))
    return math.fsum(total) ** (1.0 / p)
