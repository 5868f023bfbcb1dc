"""Abel equation I^α ψ = f in coefficient space.

The solution coefficients are ψ = D f with D the signed derivative matrix,
i.e. ψ_m = Σ_n (-1)^n f_n A^{-α,β,γ}_{mn}. Whether the resulting series
converges in L_q(ω) is governed by the decay |ψ_m| ~ m^(-λ) together with
s = 3/2 + max(β, γ):

* λ <= 1/2       -> q = p only                     ("p-only")
* 1/2 < λ < s    -> any q below (2s-1)/(s-λ)       ("bounded-q")
* λ >= s         -> q arbitrarily large            ("unbounded-q")
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatchError, DegenerateFitError, DomainError
from .fracops import FracOrder, apply_coeff, rl_quadrature
from .jacobi import JacobiBasis
from .opmatrix import assemble
from .quadrature import CoeffVector, synthesize

__all__ = [
    "DecayReport",
    "ResidualReport",
    "ZMReport",
    "solve",
    "decay_s",
    "classify",
    "estimate_decay",
    "residual",
    "zm_condition",
    "derivative_norm_growth",
    "rank_probe",
]

# Fitted exponents within this distance of a regime boundary count as ties.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class DecayReport:
    lambda_hat: float
    s: float
    q_bound: float | None
    """(2s-1)/(s-λ) in the bounded-q regime, inf when unbounded, None for p-only."""
    regime: str
    fit_range: tuple[int, int]
    fit_residual: float
    skipped: tuple[int, ...] = ()
    """Indices in the window dropped because the coefficient was exactly zero."""


@dataclass(frozen=True)
class ResidualReport:
    coeff: float
    """‖I^α ψ - f‖_2 over the common leading coefficient block."""
    pointwise: float | None
    """Max |Σ f_m p_m(x) - I^α[Σ ψ_n p_n](x)| over interior grid points."""

    def __float__(self) -> float:
        return self.coeff


@dataclass(frozen=True)
class ZMReport:
    omega: float
    exponent: float | None
    """q(s-λ) - 2s; the weighted series converges iff this is below -1."""
    convergent: bool


def solve(f: CoeffVector, alpha: float, N: int | None = None) -> CoeffVector:
    """Coefficients ψ_0..ψ_N of the solution of I^α_{a+} ψ = f.

    This is exactly ``apply_coeff(f, FracOrder.derivative(alpha), N_out=N)``.
    """
    if not 0 <= alpha < 1:
        raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
    return apply_coeff(f, FracOrder(alpha, "derivative"), "left", f.N if N is None else N)


def decay_s(basis: JacobiBasis) -> float:
    return 1.5 + max(basis.beta, basis.gamma)


def classify(lam: float, s: float) -> tuple[str, float | None]:
    """Regime and q bound for decay exponent ``lam``."""
    if lam <= 0.5 + TIE_TOL:
        return "p-only", None
    if lam >= s - TIE_TOL:
        return "unbounded-q", math.inf
    return "bounded-q", (2 * s - 1) / (s - lam)


def _window(c: CoeffVector, window) -> tuple[int, int]:
    N = c.N
    lo, hi = (max(1, (N + 1) // 2), N) if window is None else (int(window[0]), int(window[1]))
    if lo < 0 or hi > N or lo > hi:
        raise DomainError(f"window [{lo}, {hi}] is outside the index range 0..{N}")
    if hi - lo + 1 < 6:
        raise DomainError(f"window [{lo}, {hi}] needs at least 6 indices")
    return lo, hi


def estimate_decay(c: CoeffVector, window: tuple[int, int] | None = None) -> DecayReport:
    """Fit |c_m| ~ m^(-λ) by least squares in log-log coordinates.

    The default window is the upper half of the available indices. Exact
    zeros (for instance the odd coefficients of an even function) are
    skipped. A fitted growth rate is reported as λ = 0.
    """
    lo, hi = _window(c, window)
    m = np.arange(lo, hi + 1)
    vals = np.abs(c.coeffs[lo : hi + 1])
    keep = (vals > 0) & (m > 0)
    skipped = tuple(int(i) for i in m[~keep])
    if keep.sum() < 4:
        raise DegenerateFitError(f"only {int(keep.sum())} nonzero coefficients in the window")
    X = np.log(m[keep].astype(float))
    Y = np.log(vals[keep])
    slope, icpt = np.polyfit(X, Y, 1)
    rms = float(np.sqrt(np.mean((Y - (slope * X + icpt)) ** 2)))
    lam = max(0.0, -float(slope))
    s = decay_s(c.basis)
    regime, q_bound = classify(lam, s)
    return DecayReport(lam, s, q_bound, regime, (lo, hi), rms, skipped)


def residual(
    f: CoeffVector,
    psi: CoeffVector,
    alpha: float,
    n_points: int = 50,
    pointwise: bool = True,
) -> ResidualReport:
    """A posteriori check of I^α ψ = f.

    The coefficient residual compares apply_coeff(ψ) with f on indices
    0..f.N. The pointwise residual evaluates the truncated series of f
    against a direct quadrature of I^α applied to the synthesized ψ at
    ``n_points`` interior midpoints; it includes the truncation error of f.
    """
    if f.basis != psi.basis:
        raise BasisMismatchError("f and psi live on different bases")
    if not np.any(psi.coeffs) and not np.any(f.coeffs):
        return ResidualReport(0.0, 0.0 if pointwise else None)
    image = apply_coeff(psi, FracOrder(alpha, "integral"), "left", f.N)
    coeff = float(np.linalg.norm(image.coeffs - f.coeffs))
    if not pointwise:
        return ResidualReport(coeff, None)
    basis = f.basis
    xs = basis.a + basis.length * (np.arange(n_points) + 0.5) / n_points
    # ψ is a polynomial of degree psi.N, so enough nodes make the rule exact.
    nodes = max(20, psi.N // 2 + 2)
    direct = np.array(
        [rl_quadrature(psi, FracOrder(alpha, "integral"), "left", x, basis, n_nodes=nodes) for x in xs]
    )
    sup = float(np.max(np.abs(synthesize(f, xs) - direct)))
    return ResidualReport(coeff, sup)


def zm_condition(c: CoeffVector, q: float, lam: float | None = None) -> ZMReport:
    """Truncated Ω_q(c) = (Σ_{n>=1} |c_n|^q n^(q-2) M_n^(q-2))^(1/q), M_n = n^(a+1/2).

    ``a = max(β, γ)`` and the constant in M_n is set to 1, so only the
    convergence flag is meaningful in absolute terms. The flag compares the
    summand exponent q(s-λ) - 2s with -1, using ``lam`` or a fitted λ̂.
    Without ``lam``, a vector too short or too sparse for a decay fit is
    treated as finitely supported and reported convergent.
    """
    if q < 2:
        raise DomainError(f"q must be at least 2, got {q}")
    a = max(c.basis.beta, c.basis.gamma)
    n = np.arange(1, c.N + 1, dtype=float)
    cn = np.abs(c.coeffs[1:])
    with np.errstate(divide="ignore"):
        logs = q * np.log(cn) + (q - 2) * np.log(n) + (q - 2) * (a + 0.5) * np.log(n)
    live = cn > 0
    if not np.any(live):
        return ZMReport(0.0, None, True)
    top = float(np.max(logs[live]))
    omega = math.exp((top + math.log(float(np.sum(np.exp(logs[live] - top))))) / q)
    if lam is None:
        try:
            lam = estimate_decay(c).lambda_hat
        except (DegenerateFitError, DomainError):
            return ZMReport(omega, None, True)
    s = decay_s(c.basis)
    expo = q * (s - lam) - 2 * s
    return ZMReport(omega, expo, expo < -1 - TIE_TOL)


def derivative_norm_growth(f: CoeffVector, alpha: float, ks=None) -> tuple[np.ndarray, np.ndarray, bool]:
    """Norms ‖D^α S_k f‖_2 of partial sums, in coefficient space.

    Returns ``(ks, norms, growing)``. ``growing`` flags a log-log slope
    above 0.1 over the upper half of ``ks``; this is a diagnostic for the
    uniform bound assumed on the partial sums, not a proof either way.
    """
    ks = np.arange(1, f.N + 1) if ks is None else np.asarray(ks, dtype=int)
    D = assemble(f.basis, -alpha, "left", f.N).entries
    norms = np.array([np.linalg.norm(D[:, : k + 1] @ f.coeffs[: k + 1]) for k in ks])
    half = ks >= ks[len(ks) // 2]
    growing = False
    if half.sum() >= 2 and np.all(norms[half] > 0):
        slope = np.polyfit(np.log(ks[half].astype(float)), np.log(norms[half]), 1)[0]
        growing = bool(slope > 0.1)
    return ks, norms, growing


def rank_probe(basis: JacobiBasis, alpha: float, N: int) -> tuple[int, float]:
    """Numerical rank and 2-norm condition number of the N-truncated D^α matrix.

    Full rank means distinct truncated coefficient vectors have distinct
    images; this is a finite proxy for uniqueness of the Abel solution.
    """
    D = assemble(basis, -alpha, "left", N).entries
    return int(np.linalg.matrix_rank(D)), float(np.linalg.cond(D))
