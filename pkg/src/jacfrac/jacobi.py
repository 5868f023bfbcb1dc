"""Orthonormal Jacobi polynomials on an arbitrary interval [a, b].

The basis polynomials p_n are orthonormal with respect to the weight
``(x - a)**beta * (b - x)**gamma`` and have positive leading coefficient,
which is the sign convention of the Rodrigues form
``p_n = delta_n * (x-a)**-beta (b-x)**-gamma d^n/dx^n[(x-a)**(n+beta) (b-x)**(n+gamma)]``
with ``sign(delta_n) = (-1)**n``.

Values are computed with the three-term recurrence; the explicit Rodrigues
expansion is kept only as a small-n cross-check (:func:`rodrigues_pn`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import mpmath
import numpy as np
from scipy import special as sp

from .errors import DomainError, IndexRangeError
from .special import gen_binom

__all__ = [
    "Interval",
    "JacobiBasis",
    "BasisRange",
    "delta_n",
    "eval_pn",
    "eval_all",
    "eval_derivatives",
    "leading_coeff",
    "taylor_coeff",
    "log_taylor_table",
    "endpoint_derivative",
    "rodrigues_pn",
    "basis_range",
    "lemma1_admissible",
]

Side = Literal["left", "right"]


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise DomainError(f"interval needs finite a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class JacobiBasis:
    """Jacobi system on ``interval`` with weight (x-a)^beta (b-x)^gamma."""

    interval: Interval
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if isinstance(self.interval, tuple):
            object.__setattr__(self, "interval", Interval(*self.interval))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "gamma", float(self.gamma))
        if self.beta <= -1 or self.gamma <= -1:
            raise DomainError(
                f"weight exponents must exceed -1, got beta={self.beta}, gamma={self.gamma}"
            )
        if self.beta + self.gamma + 1 < 0:
            # delta_0 has no real closed form here.
            raise DomainError(
                f"beta + gamma + 1 < 0 is not supported (beta={self.beta}, gamma={self.gamma})"
            )

    @classmethod
    def on(cls, a: float, b: float, beta: float = 0.0, gamma: float = 0.0) -> JacobiBasis:
        return cls(Interval(float(a), float(b)), beta, gamma)

    @property
    def a(self) -> float:
        return self.interval.a

    @property
    def b(self) -> float:
        return self.interval.b

    @property
    def length(self) -> float:
        return self.interval.length

    def reflected(self) -> JacobiBasis:
        """The same interval with the weight exponents swapped."""
        return JacobiBasis(self.interval, self.gamma, self.beta)

    def weight(self, x):
        x = np.asarray(x, dtype=float)
        return (x - self.a) ** self.beta * (self.b - x) ** self.gamma

    def weight_mass(self) -> float:
        """Integral of the weight over [a, b]."""
        return self.length ** (self.beta + self.gamma + 1) * math.exp(
            sp.betaln(self.beta + 1, self.gamma + 1)
        )

    def to_reference(self, x):
        """Map [a, b] onto [-1, 1]."""
        return (2.0 * np.asarray(x, dtype=float) - self.a - self.b) / self.length

    def from_reference(self, t):
        return 0.5 * self.length * (np.asarray(t, dtype=float) + 1.0) + self.a

    def recurrence(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Jacobi-matrix coefficients of the orthonormal system on [-1, 1].

        Returns ``(diag, off)`` with ``t p_n = off[n] p_{n+1} + diag[n] p_n +
        off[n-1] p_{n-1}``; ``diag`` has length N+1 and ``off`` length N+1
        (``off[n]`` couples n and n+1).
        """
        # In the reference variable t the weight is (1-t)^A (1+t)^B.
        A, B = self.gamma, self.beta
        n = np.arange(N + 1, dtype=float)
        s = 2 * n + A + B
        with np.errstate(divide="ignore", invalid="ignore"):
            diag = (B * B - A * A) / (s * (s + 2))
        diag[0] = (B - A) / (A + B + 2)
        m = n + 1
        sm = 2 * m + A + B
        with np.errstate(divide="ignore", invalid="ignore"):
            off = (2.0 / sm) * np.sqrt(
                m * (m + A) * (m + B) * (m + A + B) / ((sm - 1) * (sm + 1))
            )
        off[0] = 2.0 / (A + B + 2) * math.sqrt((1 + A) * (1 + B) / (A + B + 3))
        return diag, off

    def scale(self) -> float:
        """Factor turning reference-orthonormal values into [a, b]-orthonormal ones."""
        return (0.5 * self.length) ** (-(self.beta + self.gamma + 1) / 2)

    def p0(self) -> float:
        """The constant value of p_0 on [a, b]."""
        return 1.0 / math.sqrt(self.weight_mass())


@dataclass(frozen=True)
class BasisRange:
    """Pollard's window: the Jacobi system is a basis of L_p(ω) for M_lower < p < m_upper."""

    M_lower: float
    m_upper: float

    def contains(self, p: float) -> bool:
        return self.M_lower < p < self.m_upper


def _check_x(basis: JacobiBasis, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any((x < basis.a) | (x > basis.b)) or np.any(~np.isfinite(x)):
        raise DomainError(f"evaluation point outside [{basis.a}, {basis.b}]")
    return x


def _log_delta_abs(basis: JacobiBasis, n: int) -> float:
    beta, gamma, L = basis.beta, basis.gamma, basis.length
    s = beta + gamma
    if n == 0:
        # (s+1) Γ(s+1) = Γ(s+2) removes the 0·∞ form at s = -1.
        core = sp.gammaln(s + 2) - sp.gammaln(beta + 1) - sp.gammaln(gamma + 1)
    else:
        core = (
            math.log(s + 2 * n + 1)
            + sp.gammaln(s + n + 1)
            - sp.gammaln(n + 1)
            - sp.gammaln(beta + n + 1)
            - sp.gammaln(gamma + n + 1)
        )
    return 0.5 * core - (n + (s + 1) / 2) * math.log(L)


def delta_n(basis: JacobiBasis, n: int) -> float:
    """Normalising multiplier δ_n, including its (-1)^n sign."""
    if n < 0:
        raise IndexRangeError(f"n must be non-negative, got {n}")
    if n == 0 and basis.beta + basis.gamma + 1 == 0:
        return 1.0 / math.sqrt(math.gamma(basis.beta + 1) * math.gamma(basis.gamma + 1))
    return (-1) ** n * math.exp(_log_delta_abs(basis, n))


def eval_all(basis: JacobiBasis, N: int, x) -> np.ndarray:
    """Values of p_0..p_N at ``x``; shape ``(N+1,) + x.shape``."""
    x = _check_x(basis, x)
    t = basis.to_reference(x)
    diag, off = basis.recurrence(max(N, 1))
    out = np.empty((N + 1,) + t.shape)
    out[0] = basis.p0()
    if N >= 1:
        out[1] = (t - diag[0]) * out[0] / off[0]
    for n in range(1, N):
        out[n + 1] = ((t - diag[n]) * out[n] - off[n - 1] * out[n - 1]) / off[n]
    return out


def eval_pn(basis: JacobiBasis, n: int, x):
    """Value of the orthonormal polynomial p_n at ``x`` in [a, b]."""
    if n < 0:
        raise IndexRangeError(f"n must be non-negative, got {n}")
    vals = eval_all(basis, n, x)[n]
    return vals if np.ndim(vals) else float(vals)


def eval_derivatives(basis: JacobiBasis, N: int, x, k: int) -> np.ndarray:
    """k-th derivatives of p_0..p_N at ``x`` by differentiating the recurrence."""
    x = _check_x(basis, x)
    t = basis.to_reference(x)
    diag, off = basis.recurrence(max(N, 1))
    prev = eval_all(basis, N, x)
    for order in range(1, k + 1):
        cur = np.zeros_like(prev)
        for n in range(N):
            lower = off[n - 1] * cur[n - 1] if n >= 1 else 0.0
            cur[n + 1] = ((t - diag[n]) * cur[n] + order * prev[n] - lower) / off[n]
        prev = cur
    return prev * (2.0 / basis.length) ** k


def leading_coeff(basis: JacobiBasis, n: int) -> float:
    """Coefficient of x**n in p_n (always positive)."""
    _, off = basis.recurrence(max(n, 1))
    log_c = math.log(basis.p0()) - float(np.sum(np.log(off[:n]))) + n * math.log(2.0 / basis.length)
    return math.exp(log_c)


def _log_endpoint_sum(n: int, k: int, b1: float, b2: float) -> float:
    """log of Σ_i C(n,i) binom(n+b1, n-i) binom(n+b2, i) C(k,i) binom(n-i, k-i) i!.

    Every summand is positive. Summands are generated from the i = 0 term by
    their rational ratio, which keeps the relative error near a few ulps.
    """
    log0 = (
        sp.gammaln(n + b1 + 1) - sp.gammaln(b1 + 1)
        + sp.gammaln(n + 1) - sp.gammaln(n - k + 1)
    )
    ratios = [1.0]
    r = 1.0
    for i in range(k):
        r *= (n + b2 - i) * (k - i) / ((i + 1) * (b1 + i + 1))
        ratios.append(r)
    try:
        total = math.fsum(ratios)
    except OverflowError:
        total = math.inf
    if math.isfinite(total):
        return float(log0) + math.log(total)
    return _log_endpoint_sum_logspace(n, k, b1, b2)


def _log_endpoint_sum_logspace(n: int, k: int, b1: float, b2: float) -> float:
    i = np.arange(k + 1, dtype=float)
    log_terms = (
        sp.gammaln(n + 1) - sp.gammaln(i + 1) - sp.gammaln(n - i + 1)
        + sp.gammaln(n + b1 + 1) - sp.gammaln(b1 + i + 1)
        + sp.gammaln(n + b2 + 1) - sp.gammaln(n + b2 - i + 1)
        + sp.gammaln(k + 1) - sp.gammaln(i + 1) - sp.gammaln(k - i + 1)
        + sp.gammaln(n - i + 1) - sp.gammaln(n - k + 1)
        + sp.gammaln(i + 1)
    )
    top = float(np.max(log_terms))
    return top + math.log(math.fsum(np.exp(log_terms - top).tolist()))


def _check_nk(n: int, k: int):
    if n < 0 or k < 0:
        raise IndexRangeError(f"indices must be non-negative, got n={n}, k={k}")
    if k > n:
        raise IndexRangeError(f"derivative order k={k} exceeds degree n={n}")


def _log_taylor(basis: JacobiBasis, n: int, k: int) -> float:
    # |p_n^(k)(a)| (b-a)^k = |δ_n| (b-a)^n · (endpoint sum)
    return (
        _log_delta_abs(basis, n)
        + n * math.log(basis.length)
        + _log_endpoint_sum(n, k, basis.beta, basis.gamma)
    )


@lru_cache(maxsize=4096)
def _mp_taylor(beta: float, gamma: float, L: float, n: int, k: int) -> float:
    """𝔠_n^(k)(β, γ) from the closed endpoint sum in 40-digit arithmetic."""
    mp = mpmath.mp
    with mpmath.workdps(40):
        b1, b2, L = mp.mpf(beta), mp.mpf(gamma), mp.mpf(L)
        s = b1 + b2
        if n == 0:
            core = mp.gamma(s + 2) / (mp.gamma(b1 + 1) * mp.gamma(b2 + 1))
        else:
            core = (s + 2 * n + 1) * mp.gamma(s + n + 1) / (
                mp.factorial(n) * mp.gamma(b1 + n + 1) * mp.gamma(b2 + n + 1)
            )
        # |δ_n| (b-a)^n
        scale = mp.sqrt(core) * mp.power(L, -(s + 1) / 2)
        term = mp.gamma(n + b1 + 1) / mp.gamma(b1 + 1) * mp.factorial(n) / mp.factorial(n - k)
        total = term
        for i in range(k):
            term *= (n + b2 - i) * (k - i) / ((i + 1) * (b1 + i + 1))
            total += term
        return float(scale * total)


def taylor_coeff(basis: JacobiBasis, n: int, k: int) -> float:
    """Endpoint Taylor coefficient 𝔠_n^(k)(β, γ) = (-1)^(n+k) p_n^(k)(a) (b-a)^k.

    Always positive and correctly rounded in practice (the closed sum is
    evaluated with 40 significant digits). The right-endpoint data are
    ``taylor_coeff(basis.reflected(), n, k)``.
    """
    _check_nk(n, k)
    return _mp_taylor(basis.beta, basis.gamma, basis.length, n, k)


def log_taylor_table(basis: JacobiBasis, N: int) -> np.ndarray:
    """``log 𝔠_n^(k)`` for 0 <= k <= n <= N, ``-inf`` above the diagonal."""
    out = np.full((N + 1, N + 1), -np.inf)
    for n in range(N + 1):
        row = _log_taylor_row(basis, n)
        if row is None:
            row = [_log_taylor(basis, n, k) for k in range(n + 1)]
        out[n, : n + 1] = row
    return out


def _log_taylor_row(basis: JacobiBasis, n: int) -> np.ndarray | None:
    """``log 𝔠_n^(k)`` for k = 0..n in one pass.

    The endpoint sum equals Σ_i C(k,i) P_i with P_i = Π_{j<i} (n+γ-j)/(β+j+1),
    a binomial transform computed by repeated pairwise addition of positive
    numbers, rescaled whenever it grows large. Returns None when the P_i
    span too many decades for double precision.
    """
    b1, b2 = basis.beta, basis.gamma
    j = np.arange(n, dtype=float)
    logP = np.concatenate([[0.0], np.cumsum(np.log((n + b2 - j) / (b1 + j + 1)))])
    shift = float(np.max(logP))
    if shift - float(np.min(logP)) > 600:
        return None
    Q = np.exp(logP - shift)
    log_acc = np.empty(n + 1)
    log_acc[0] = math.log(Q[0]) + shift
    for k in range(1, n + 1):
        Q = Q[:-1] + Q[1:]
        top = Q.max()
        if top > 1e200:
            Q = Q / top
            shift += math.log(top)
        log_acc[k] = math.log(Q[0]) + shift
    k = np.arange(n + 1, dtype=float)
    log0 = sp.gammaln(n + b1 + 1) - sp.gammaln(b1 + 1) + sp.gammaln(n + 1) - sp.gammaln(n - k + 1)
    return _log_delta_abs(basis, n) + n * math.log(basis.length) + log0 + log_acc


def endpoint_derivative(basis: JacobiBasis, n: int, k: int, end: Side) -> float:
    """p_n^(k) at the left or right endpoint from the closed endpoint sums."""
    _check_nk(n, k)
    L = basis.length
    if end == "left":
        return (-1) ** (n + k) * taylor_coeff(basis, n, k) / L**k
    if end == "right":
        return taylor_coeff(basis.reflected(), n, k) / L**k
    raise ValueError(f"end must be 'left' or 'right', got {end!r}")


def rodrigues_pn(basis: JacobiBasis, n: int, x):
    """p_n from the explicit Leibniz expansion of the Rodrigues formula.

    Cancels badly for large n; use only as an independent check for small n.
    """
    x = _check_x(basis, x)
    beta, gamma = basis.beta, basis.gamma
    y = np.zeros_like(x)
    for i in range(n + 1):
        c = (-1) ** i * math.comb(n, i) * gen_binom(n + beta, n - i) * gen_binom(n + gamma, i)
        y = y + c * (x - basis.a) ** i * (basis.b - x) ** (n - i)
    vals = delta_n(basis, n) * y
    return vals if np.ndim(vals) else float(vals)


def _ratio_or_inf(num: float, den: float) -> float:
    return math.inf if den == 0 else num / den


def basis_range(beta: float, gamma: float) -> BasisRange:
    """Pollard's window (M(β,γ), m(β,γ)) for β, γ >= -1/2."""
    if beta < -0.5 or gamma < -0.5:
        raise DomainError(f"basis_range needs beta, gamma >= -1/2, got ({beta}, {gamma})")
    m_upper = 4 * min(_ratio_or_inf(beta + 1, 2 * beta + 1), _ratio_or_inf(gamma + 1, 2 * gamma + 1))
    M_lower = 4 * max((beta + 1) / (2 * beta + 3), (gamma + 1) / (2 * gamma + 3))
    return BasisRange(M_lower, m_upper)


def lemma1_admissible(beta: float, gamma: float, p: float) -> bool:
    """Whether (β, γ, p) lies in the window where I^α is bounded on L_p(ω)."""
    if p <= 1:
        raise DomainError(f"p must exceed 1, got {p}")
    if not (-0.5 <= beta <= 0.5 and -0.5 <= gamma <= 0.5):
        return False
    return basis_range(beta, gamma).contains(p)
