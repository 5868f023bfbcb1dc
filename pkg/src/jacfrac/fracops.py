"""Riemann-Liouville fractional integrals and derivatives of order in (0, 1).

Two independent routes are provided:

* coefficient space, :func:`apply_coeff`, which multiplies a Jacobi
  coefficient vector by the signed operational matrix;
* physical space, :func:`rl_quadrature`, which evaluates the defining
  integral with a Gauss-Jacobi rule whose weight absorbs the kernel
  singularity (x-t)^(α-1).

For a power of the distance to the endpoint both reduce to
:func:`power_closed_form`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import AccuracyWarning, BasisMismatchError, DomainError, ScopeWarning
from .jacobi import JacobiBasis
from .opmatrix import OpMatrix, assemble
from .quadrature import CoeffVector, gauss_jacobi
from .special import gen_binom, rgamma

__all__ = [
    "FracOrder",
    "in_scope",
    "apply_coeff",
    "tail_estimate",
    "rl_quadrature",
    "power_closed_form",
    "smooth_derivative",
]

Side = Literal["left", "right"]
Kind = Literal["integral", "derivative"]

SCOPE_MESSAGE = "basis is outside Lemma 1 admissibility window"


@dataclass(frozen=True)
class FracOrder:
    """Order α of a fractional integral or derivative.

    ``alpha = 0`` (identity) and ``alpha = 1`` (ordinary integral or
    derivative) are accepted as limiting cases.
    """

    alpha: float
    kind: Kind = "integral"

    def __post_init__(self):
        if self.kind not in ("integral", "derivative"):
            raise ValueError(f"kind must be 'integral' or 'derivative', got {self.kind!r}")
        a = float(self.alpha)
        if not (0.0 <= a <= 1.0) or math.isnan(a):
            raise DomainError(f"fractional order must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "alpha", a)

    @property
    def signed(self) -> float:
        """Matrix order: +α for integrals, -α for derivatives."""
        return self.alpha if self.kind == "integral" else -self.alpha

    @classmethod
    def integral(cls, alpha: float) -> FracOrder:
        return cls(alpha, "integral")

    @classmethod
    def derivative(cls, alpha: float) -> FracOrder:
        return cls(alpha, "derivative")


def _as_order(order) -> FracOrder:
    if isinstance(order, FracOrder):
        return order
    return FracOrder(abs(order), "integral" if order >= 0 else "derivative")


def in_scope(basis: JacobiBasis) -> bool:
    """True if some p makes (β, γ, p) admissible, i.e. β, γ ∈ [-1/2, 1/2]."""
    return -0.5 <= basis.beta <= 0.5 and -0.5 <= basis.gamma <= 0.5


def _warn_scope(basis: JacobiBasis, stacklevel: int = 3) -> None:
    if not in_scope(basis):
        warnings.warn(
            f"{SCOPE_MESSAGE} (beta={basis.beta}, gamma={basis.gamma})",
            ScopeWarning,
            stacklevel=stacklevel,
        )


def apply_coeff(
    psi: CoeffVector,
    order,
    side: Side = "left",
    N_out: int | None = None,
    matrix: OpMatrix | None = None,
) -> CoeffVector:
    """Coefficients of I^α ψ (or D^α ψ) via the operational matrix.

    Parameters
    ----------
    psi : CoeffVector
        Input coefficients ψ_0..ψ_N.
    order : FracOrder or float
        A float is read as a signed order (negative for derivatives).
    side : {"left", "right"}
    N_out : int, optional
        Highest output index, default ``psi.N``. The image of a polynomial
        is generally not a polynomial, so N_out > N is often needed.
    matrix : OpMatrix, optional
        Precomputed matrix with at least (N_out+1) x (N+1) entries.
    """
    order = _as_order(order)
    N_out = psi.N if N_out is None else int(N_out)
    if N_out < 0:
        raise DomainError(f"N_out must be non-negative, got {N_out}")
    _warn_scope(psi.basis)
    if order.alpha == 0:
        return psi.truncated(N_out)
    if matrix is None:
        matrix = assemble(psi.basis, order.signed, side, N_out, n_cols=psi.N)
    else:
        if matrix.basis != psi.basis:
            raise BasisMismatchError("matrix and coefficients live on different bases")
        if matrix.alpha != order.signed or matrix.side != side:
            raise DomainError("matrix order or side does not match the request")
        if matrix.shape[0] <= N_out or matrix.shape[1] <= psi.N:
            raise DomainError(f"matrix of shape {matrix.shape} is too small")
    E = matrix.entries[: N_out + 1, : psi.N + 1]
    return CoeffVector(psi.basis, E @ psi.coeffs)


def tail_estimate(psi: CoeffVector, matrix: OpMatrix, n_keep: int) -> float:
    """Heuristic truncation error Σ_{n>n_keep} |ψ_n| max_m |entry(m, n)|.

    This bounds the effect of dropping input coefficients beyond ``n_keep``
    on the computed output block; it says nothing about output truncation.
    """
    c = np.abs(psi.coeffs[n_keep + 1 :])
    if c.size == 0:
        return 0.0
    cols = np.max(np.abs(matrix.entries[:, n_keep + 1 : n_keep + 1 + c.size]), axis=0)
    return float(np.dot(c[: cols.size], cols))


def power_closed_form(mu: float, order, side: Side = "left") -> tuple[float, float]:
    """Coefficient and exponent of the image of a power.

    I^α[(x-a)^μ] = Γ(μ+1)/Γ(μ+1+α) (x-a)^(μ+α), and D^α uses -α. On the
    right side the same holds with (b-x) in place of (x-a).
    """
    order = _as_order(order)
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if mu <= -1:
        raise DomainError(f"power exponent must exceed -1, got {mu}")
    s = order.signed
    # Γ(μ+1)/Γ(μ+1+s) = gen_binom(μ, -s); exact zero at poles of the denominator.
    return gen_binom(mu, -s), mu + s


def _integral_nodes(basis: JacobiBasis, x: float, alpha: float, side: Side, n: int):
    # Kernel (x-t)^(α-1) on [a, x] or (t-x)^(α-1) on [x, b] as a Jacobi weight.
    if side == "left":
        sub = JacobiBasis.on(basis.a, x, beta=0.0, gamma=alpha - 1.0)
    else:
        sub = JacobiBasis.on(x, basis.b, beta=alpha - 1.0, gamma=0.0)
    rule = gauss_jacobi(sub, n)
    return rule.nodes, rule.weights


def _graded_integral(f, basis, x, alpha, side, n, grading):
    """RL integral with geometric panels accumulating at the far endpoint."""
    lo, hi = (basis.a, x) if side == "left" else (x, basis.b)
    L = hi - lo
    # Breakpoints measured from the endpoint where f may be singular.
    r = np.concatenate([[0.0], grading ** np.arange(30, -1, -1, dtype=float)])
    # Panels narrower than the float spacing near the endpoint would put
    # nodes on the endpoint itself.
    floor = max(1e-14, 4 * n * n * np.finfo(float).eps * max(abs(lo), abs(hi)) / L)
    r = r[(r == 0) | (r > floor)]
    total = []
    for u0, u1 in zip(r[:-1], r[1:]):
        if side == "left":
            t0, t1 = lo + u0 * L, lo + u1 * L
        else:
            t0, t1 = hi - u1 * L, hi - u0 * L
        if u1 == 1.0:
            # The panel ending at x carries the kernel singularity.
            sub = (
                JacobiBasis.on(t0, t1, beta=0.0, gamma=alpha - 1.0)
                if side == "left"
                else JacobiBasis.on(t0, t1, beta=alpha - 1.0, gamma=0.0)
            )
            rule = gauss_jacobi(sub, n)
            total.append(float(np.dot(rule.weights, f(rule.nodes))))
        else:
            sub = JacobiBasis.on(t0, t1)
            rule = gauss_jacobi(sub, n)
            t = rule.nodes
            ker = (x - t) ** (alpha - 1.0) if side == "left" else (t - x) ** (alpha - 1.0)
            total.append(float(np.dot(rule.weights, f(t) * ker)))
    return math.fsum(total)


def _rl_integral(f, basis, x, alpha, side, n, grading):
    if alpha == 0:
        return float(f(np.array([x]))[0])
    if grading is not None:
        val = _graded_integral(f, basis, x, alpha, side, n, grading)
    else:
        nodes, weights = _integral_nodes(basis, x, alpha, side, n)
        val = float(np.dot(weights, f(nodes)))
    return val * rgamma(alpha)


def _check_point(basis: JacobiBasis, x: float, side: Side) -> float:
    x = float(x)
    if side == "left" and not (basis.a < x <= basis.b):
        raise DomainError(f"x = {x} must lie in ({basis.a}, {basis.b}]")
    if side == "right" and not (basis.a <= x < basis.b):
        raise DomainError(f"x = {x} must lie in [{basis.a}, {basis.b})")
    return x


def _vectorize(f: Callable) -> Callable:
    def g(t):
        return np.asarray(f(t), dtype=float) * np.ones_like(t)

    return g


def rl_quadrature(
    f: Callable,
    order,
    side: Side,
    x: float,
    basis: JacobiBasis,
    fprime: Callable | None = None,
    n_nodes: int = 40,
    grading: float | None = None,
) -> float:
    """Evaluate I^α f(x) or D^α f(x) from the defining integral.

    Parameters
    ----------
    f : callable
        Vectorised function on the basis interval.
    order : FracOrder or float
    side : {"left", "right"}
    x : float
        Evaluation point, in (a, b] for the left side and [a, b) for the right.
    basis : JacobiBasis
        Only the interval is used.
    fprime : callable, optional
        Derivative of f. For derivatives it enables the exact
        representation of :func:`smooth_derivative`; without it the
        derivative of I^(1-α) f is taken by Richardson-extrapolated central
        differences and an :class:`AccuracyWarning` is emitted.
    n_nodes : int
        Gauss-Jacobi nodes. The rule is exact for polynomials of degree
        below 2 * n_nodes.
    grading : float in (0, 1), optional
        Split the interval into geometric panels with this ratio toward
        the far endpoint, for integrands that are singular there.
    """
    order = _as_order(order)
    x = _check_point(basis, x, side)
    f = _vectorize(f)
    if grading is not None and not 0 < grading < 1:
        raise DomainError(f"grading ratio must lie in (0, 1), got {grading}")
    if order.kind == "integral":
        return _rl_integral(f, basis, x, order.alpha, side, n_nodes, grading)
    if order.alpha == 0:
        return float(f(np.array([x]))[0])
    if fprime is not None:
        return smooth_derivative(f, fprime, order, x, basis, side, n_nodes=n_nodes)
    warnings.warn(
        "fractional derivative by finite differences of the integral; expect ~1e-8 accuracy",
        AccuracyWarning,
        stacklevel=2,
    )
    beta = 1.0 - order.alpha
    lo, hi = basis.a, basis.b
    room = min(x - lo, hi - x)
    h = 0.25 * room if room > 0 else 1e-3 * basis.length

    def F(y):
        return _rl_integral(f, basis, y, beta, side, n_nodes, grading)

    def central(step):
        return (F(x + step) - F(x - step)) / (2 * step)

    if room > 0:
        # Two Richardson levels on the central difference.
        d1, d2, d3 = central(h), central(h / 2), central(h / 4)
        r1, r2 = (4 * d2 - d1) / 3, (4 * d3 - d2) / 3
        d = (16 * r2 - r1) / 15
    else:
        s = 1.0 if x == lo else -1.0
        steps = [h, h / 2, h / 4]
        d1, d2, d3 = [(F(x + s * st) - F(x)) / (s * st) for st in steps]
        r1, r2 = 2 * d2 - d1, 2 * d3 - d2
        d = (4 * r2 - r1) / 3
    return d if side == "left" else -d


def smooth_derivative(
    f: Callable,
    fprime: Callable,
    order,
    x: float,
    basis: JacobiBasis,
    side: Side = "left",
    n_nodes: int = 40,
) -> float:
    """D^α f(x) for 0 < α < 1 and absolutely continuous f.

    Left side:  f(a) (x-a)^(-α) / Γ(1-α) + I^(1-α)_{a+}[f'](x).
    Right side: f(b) (b-x)^(-α) / Γ(1-α) - I^(1-α)_{b-}[f'](x).

    The boundary term grows like a power of the distance to the endpoint
    when f does not vanish there; the value is returned as is.
    """
    order = _as_order(order)
    alpha = order.alpha
    if not 0 < alpha < 1:
        raise DomainError(f"smooth_derivative needs 0 < alpha < 1, got {alpha}")
    x = _check_point(basis, x, side)
    f = _vectorize(f)
    fprime = _vectorize(fprime)
    end = basis.a if side == "left" else basis.b
    dist = abs(x - end)
    f_end = float(f(np.array([end]))[0])
    boundary = f_end * dist ** (-alpha) * rgamma(1.0 - alpha) if f_end != 0 else 0.0
    rest = _rl_integral(fprime, basis, x, 1.0 - alpha, side, n_nodes, None)
    return boundary + rest if side == "left" else boundary - rest
