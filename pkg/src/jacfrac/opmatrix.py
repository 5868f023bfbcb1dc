"""Operational matrices of Riemann-Liouville operators in a Jacobi basis.

For orthonormal Jacobi polynomials p_n on [a, b] with weight
ω = (x-a)^β (b-x)^γ the inner products of the fractional integral are

    (p_m, I^α_{a+} p_n)_ω = (-1)^n A^{α,β,γ}_{mn}
    (p_m, I^α_{b-} p_n)_ω = (-1)^m A^{α,γ,β}_{mn}

with

    A^{α,β,γ}_{mn} = δ̂_m Σ_{k=0}^{n} (-1)^k 𝔠_n^(k)(β,γ) B(α+β+k+1, γ+m+1) / Γ(k+α-m+1).

A negative order -α stands for the derivative D^α. :class:`OpMatrix`
stores the signed values above, so applying an operator to a coefficient
vector is a plain matrix-vector product.

The k-sum alternates and cancels heavily once n grows past ~10. Terms are
first formed from log-magnitudes in double precision; entries whose sum
is small compared with the largest term are recomputed with mpmath at a
working precision sized to the observed cancellation.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import mpmath
import numpy as np
from scipy import special as sp

from .errors import DomainError, IndexRangeError, StabilityWarning
from .jacobi import JacobiBasis, _log_delta_abs, log_taylor_table
from .special import POLE_TOL, signed_log_arrays

__all__ = [
    "OpMatrix",
    "SymmetryReport",
    "stability_cap",
    "a_entry",
    "a_block",
    "assemble",
    "compose_block",
    "oracle_entry",
    "oracle_block",
    "check_ultraspherical_symmetry",
    "singular_value_report",
]

Side = Literal["left", "right"]

DEFAULT_STABLE_N = 30
ORACLE_MAX_INDEX = 20
# Entries with |sum| below this fraction of the largest term are recomputed.
CANCELLATION_THRESHOLD = 1e-3
# Decimal digits kept beyond the digits lost to cancellation.
GUARD_DIGITS = 25
MAX_DPS = 2000
# Relative error of one exponentiated log-form term; each double-path entry
# is then uncertain by about this times its largest term.
TERM_EPS = 64 * np.finfo(float).eps
# Test hook: when set to m, the sign of δ̂_m is flipped in a_block. Used by
# the self-check to confirm that its suites detect a sign error.
_DHAT_SIGN_FLIP: int | None = None


def stability_cap() -> int:
    """Largest index trusted in pure double precision (env ``JACFRAC_MAX_N``)."""
    raw = os.environ.get("JACFRAC_MAX_N")
    if raw is None:
        return DEFAULT_STABLE_N
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"JACFRAC_MAX_N must be an integer, got {raw!r}") from None


def _check_side(side: str) -> None:
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _check_order(basis: JacobiBasis, alpha: float) -> None:
    if not -1.0 < alpha < 1.0:
        raise DomainError(f"operator order must lie in (-1, 1), got {alpha}")
    # The k = 0 Beta argument; the boundary terms of the integration by
    # parts vanish only when it is positive.
    if alpha + basis.beta + 1 <= 0:
        raise DomainError(
            f"alpha + beta + 1 must be positive (alpha={alpha}, beta={basis.beta}); "
            "the inner products diverge at the left endpoint"
        )


def _log_dhat(basis: JacobiBasis, alpha: float, m: np.ndarray) -> np.ndarray:
    # δ̂_m = |δ_m| (b-a)^(m + α + β + γ + 1) = (b-a)^(α + (β+γ+1)/2) sqrt(...)
    logL = math.log(basis.length)
    shift = alpha + basis.beta + basis.gamma + 1
    return np.array([_log_delta_abs(basis, int(mi)) + (mi + shift) * logL for mi in m])


@lru_cache(maxsize=64)
def _log_taylor_cached(basis: JacobiBasis, N: int) -> np.ndarray:
    table = log_taylor_table(basis, N)
    table.setflags(write=False)
    return table


def _float_terms(basis: JacobiBasis, alpha: float, rows: np.ndarray, N: int):
    """Signs and log-magnitudes of every k-term, shape (rows, N+1 cols, N+1 k)."""
    beta, gamma = basis.beta, basis.gamma
    k = np.arange(N + 1, dtype=float)
    m = rows.astype(float)
    logc = _log_taylor_cached(basis, N)  # [n, k]
    logdh = _log_dhat(basis, alpha, rows)  # [m]
    logB = sp.betaln(alpha + beta + k[None, :] + 1, gamma + m[:, None] + 1)  # [m, k]
    g_sign, g_log = signed_log_arrays(k[None, :] + alpha - m[:, None] + 1)  # [m, k]
    logs = logdh[:, None, None] + logc[None, :, :] + logB[:, None, :] - g_log[:, None, :]
    alt = np.where(np.arange(N + 1) % 2, -1, 1)
    signs = (alt[None, :] * g_sign)[:, None, :] * np.isfinite(logc)[None, :, :]
    signs = np.broadcast_to(signs, logs.shape).astype(int)
    logs = np.where(signs != 0, logs, -np.inf)
    return signs, logs


def _mp_core(beta, gamma, n):
    """(s+2n+1) Γ(s+n+1) / (n! Γ(β+n+1) Γ(γ+n+1)), s = β+γ, in mpmath."""
    mp = mpmath.mp
    s = beta + gamma
    if n == 0:
        return mp.gamma(s + 2) / (mp.gamma(beta + 1) * mp.gamma(gamma + 1))
    return (s + 2 * n + 1) * mp.gamma(s + n + 1) / (
        mp.factorial(n) * mp.gamma(beta + n + 1) * mp.gamma(gamma + n + 1)
    )


# Extended-precision caches. A value stored at some precision serves every
# request at that precision or below.
_CROW_CACHE: dict = {}
_WEIGHT_CACHE: dict = {}
_CACHE_LIMIT = 20000


def _cache_put(cache: dict, key, value):
    if len(cache) >= _CACHE_LIMIT:
        cache.clear()
    cache[key] = value


def _provisioned_dps(n: int) -> int:
    # Cancellation in the k-sum grows roughly like n digits; caching at this
    # precision avoids recomputing rows as requests escalate.
    return _dps_bucket(GUARD_DIGITS + 16 + n)


def _mp_taylor_row(basis: JacobiBasis, n: int, dps: int):
    """𝔠_n^(k), k = 0..n, with at least ``dps`` digits."""
    key = (basis.beta, basis.gamma, basis.length, n)
    hit = _CROW_CACHE.get(key)
    if hit is not None and hit[0] >= dps:
        return hit[1]
    dps = max(dps, _provisioned_dps(n))
    mp = mpmath.mp
    with mpmath.workdps(dps):
        beta, gamma = mp.mpf(basis.beta), mp.mpf(basis.gamma)
        L = mp.mpf(basis.length)
        pref = mp.sqrt(_mp_core(beta, gamma, n)) * mp.power(L, -(beta + gamma + 1) / 2)
        g_ratio = mp.gamma(n + beta + 1) / mp.gamma(beta + 1)
        # Σ_i C(k,i) P_i with P_i = Π_{j<i} (n+γ-j)/(β+j+1): a binomial
        # transform of positive numbers. It runs exactly on fixed-point
        # integers, so the only error is the rounding of each P_i, and
        # P_i >= min(1, P_n) keeps that relative error near 2^-bits.
        bits = int(dps * 3.33) + 64
        P = mp.mpf(1)
        Q = [int(mp.ldexp(P, bits))]
        for j in range(n):
            P = P * (n + gamma - j) / (beta + j + 1)
            Q.append(int(mp.ldexp(P, bits)))
        acc_int = [Q[0]]
        for _ in range(n):
            Q = [u + v for u, v in zip(Q[:-1], Q[1:])]
            acc_int.append(Q[0])
        acc = [mp.ldexp(mp.mpf(q), -bits) for q in acc_int]
        row = []
        lead = pref * g_ratio
        for k in range(n + 1):
            if k:
                lead *= n - k + 1
            row.append(lead * acc[k])
    _cache_put(_CROW_CACHE, key, (dps, row))
    return row


def _mp_row_weights(basis: JacobiBasis, alpha: float, m: int, K: int, dps: int):
    """δ̂_m and w_k = (-1)^k B(α+β+k+1, γ+m+1)/Γ(k+α-m+1) for k <= K."""
    key = (basis.beta, basis.gamma, basis.length, alpha, m)
    hit = _WEIGHT_CACHE.get(key)
    if hit is not None and hit[0] >= dps and len(hit[2]) > K:
        return hit[1], hit[2]
    dps = max(dps, _provisioned_dps(K))
    mp = mpmath.mp
    with mpmath.workdps(dps):
        beta, gamma = mp.mpf(basis.beta), mp.mpf(basis.gamma)
        a = mp.mpf(alpha)
        L = mp.mpf(basis.length)
        dhat = mp.power(L, a + (beta + gamma + 1) / 2) * mp.sqrt(_mp_core(beta, gamma, m))
        Bk = mp.beta(a + beta + 1, gamma + m + 1)
        integer_order = abs(alpha - round(alpha)) < POLE_TOL
        rg = None if integer_order else mp.rgamma(a - m + 1)
        w = []
        for k in range(K + 1):
            if integer_order:
                z = k + int(round(alpha)) - m + 1
                rgk = mp.mpf(0) if z <= 0 else 1 / mp.factorial(z - 1)
            else:
                rgk = rg
                rg /= k + a - m + 1
            w.append(Bk * rgk if k % 2 == 0 else -Bk * rgk)
            Bk *= (a + beta + k + 1) / (a + beta + k + 1 + gamma + m + 1)
    _cache_put(_WEIGHT_CACHE, key, (dps, dhat, w))
    return dhat, w


def _dps_bucket(dps: float) -> int:
    return int(16 * math.ceil(dps / 16))


def _mp_entry(basis: JacobiBasis, alpha: float, m: int, n: int, K: int, dps: int):
    """A^{α,β,γ}_{mn} at ``dps`` digits, as (float value, log10 |value|)."""
    crow = _mp_taylor_row(basis, n, dps)
    dhat, w = _mp_row_weights(basis, alpha, m, max(K, n), dps)
    with mpmath.workdps(dps):
        total = mpmath.fdot(crow, w[: n + 1]) * dhat
        if total == 0:
            return 0.0, -math.inf
        return float(total), float(mpmath.log10(abs(total)))


def _mp_entry_adaptive(
    basis: JacobiBasis, alpha: float, m: int, n: int, K: int, top_log10: float, lost_hint: float
) -> float:
    """Recompute one entry, raising the precision until the cancellation is covered.

    ``top_log10`` is log10 of the largest term in the sum.
    """
    dps = max(_dps_bucket(GUARD_DIGITS + max(lost_hint, 16.0)), _provisioned_dps(n))
    prev_noise = False
    while True:
        value, logv = _mp_entry(basis, alpha, m, n, K, dps)
        lost = top_log10 - logv
        if lost + GUARD_DIGITS <= dps or dps >= MAX_DPS:
            return value
        # An exact zero shows up as a sum that is pure rounding noise at
        # every precision.
        noise = lost >= dps - 3
        if noise and prev_noise:
            return 0.0
        prev_noise = noise
        step = 2 * dps if noise else lost + GUARD_DIGITS + 8
        dps = min(_dps_bucket(step), MAX_DPS)


def _sum_terms(signs: np.ndarray, logs: np.ndarray):
    """Scaled sums over the last axis: (sum/top, log of top), top = largest term."""
    live = signs != 0
    top = np.max(np.where(live, logs, -np.inf), axis=-1)
    finite_top = np.where(np.isfinite(top), top, 0.0)
    scaled = np.where(live, signs * np.exp(logs - finite_top[..., None]), 0.0)
    return scaled.sum(axis=-1), top


def a_block(
    basis: JacobiBasis,
    alpha: float,
    n_rows: int,
    n_cols: int,
    precision: str = "auto",
) -> np.ndarray:
    """Unsigned A^{α,β,γ}_{mn} for m <= n_rows, n <= n_cols."""
    _check_order(basis, alpha)
    if precision not in ("auto", "double"):
        raise ValueError(f"precision must be 'auto' or 'double', got {precision!r}")
    if alpha == 0:
        # Orthonormality makes the zero-order block diag((-1)^n) exactly.
        k = min(n_rows, n_cols) + 1
        out = np.zeros((n_rows + 1, n_cols + 1))
        out[np.arange(k), np.arange(k)] = np.where(np.arange(k) % 2, -1.0, 1.0)
        return out
    rows = np.arange(n_rows + 1)
    signs, logs = _float_terms(basis, alpha, rows, n_cols)
    rel, top = _sum_terms(signs, logs)
    del signs, logs
    live = np.isfinite(top)
    with np.errstate(over="ignore"):
        out = np.where(live, rel * np.exp(np.where(live, top, 0.0)), 0.0)
    if precision == "double":
        est = TERM_EPS * np.exp(np.where(live, top, -np.inf))
        if np.max(est) > 1e-8:
            m, n = np.unravel_index(int(np.argmax(est)), est.shape)
            warnings.warn(
                f"double precision cancellation: entry ({m}, {n}) is uncertain by about "
                f"{float(est[m, n]):.1e}; use precision='auto'",
                StabilityWarning,
                stacklevel=3,
            )
        return _mutate(out)
    # Terms beyond the float range also go to extended precision.
    redo = live & ((np.abs(rel) < CANCELLATION_THRESHOLD) | ~np.isfinite(out))
    with np.errstate(divide="ignore"):
        lost = np.where(rel != 0, -np.log10(np.abs(rel)), np.inf)
    for m, n in zip(*np.nonzero(redo)):
        out[m, n] = _mp_entry_adaptive(
            basis, alpha, int(m), int(n), n_cols,
            float(top[m, n]) / math.log(10), float(min(lost[m, n], 400.0)),
        )
    return _mutate(out)


def _mutate(out: np.ndarray) -> np.ndarray:
    if _DHAT_SIGN_FLIP is not None and _DHAT_SIGN_FLIP < out.shape[0]:
        out[_DHAT_SIGN_FLIP, :] *= -1
    return out


def a_entry(basis: JacobiBasis, alpha: float, m: int, n: int, precision: str = "auto") -> float:
    """A^{α,β,γ}_{mn}; negative ``alpha`` gives the derivative entries."""
    if m < 0 or n < 0:
        raise IndexRangeError(f"indices must be non-negative, got m={m}, n={n}")
    _check_order(basis, alpha)
    signs, logs = _float_terms(basis, alpha, np.array([m]), n)
    signs, logs = signs[0, n], logs[0, n]
    live = signs != 0
    if not np.any(live):
        return 0.0
    top = float(np.max(logs[live]))
    total = math.fsum((signs[live] * np.exp(logs[live] - top)).tolist())
    if precision == "double" or abs(total) >= CANCELLATION_THRESHOLD:
        return total * math.exp(top)
    lost = -math.log10(abs(total)) if total else 400.0
    return _mp_entry_adaptive(basis, alpha, m, n, n, top / math.log(10), min(lost, 400.0))


@dataclass(frozen=True)
class OpMatrix:
    """Truncated signed operational matrix.

    ``entries[m, n]`` is (p_m, T p_n)_ω for T = I^alpha (alpha > 0) or
    D^|alpha| (alpha < 0) acting from the given side.
    """

    basis: JacobiBasis
    alpha: float
    side: Side
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=float) + 0.0  # drop negative zeros
        if e.ndim != 2 or not np.all(np.isfinite(e)):
            raise DomainError("operational matrix entries must be a finite 2-D array")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def N(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def kind(self) -> str:
        return "derivative" if self.alpha < 0 else "integral"

    def __matmul__(self, other):
        if isinstance(other, OpMatrix):
            return self.entries @ other.entries
        return self.entries @ other


def assemble(
    basis: JacobiBasis,
    alpha: float,
    side: Side = "left",
    N: int = 10,
    n_cols: int | None = None,
    precision: str = "auto",
) -> OpMatrix:
    """Signed operational matrix with rows 0..N and columns 0..n_cols.

    ``alpha > 0`` gives I^alpha, ``alpha < 0`` gives D^|alpha|, ``alpha = 0``
    the identity. Right-side matrices use A^{α,γ,β} with (-1)^m row signs.
    """
    _check_side(side)
    if N < 0:
        raise IndexRangeError(f"N must be non-negative, got {N}")
    n_cols = N if n_cols is None else n_cols
    if precision == "double" and max(N, n_cols) > stability_cap():
        warnings.warn(
            f"indices above {stability_cap()} are not reliable in double precision",
            StabilityWarning,
            stacklevel=2,
        )
    if side == "left":
        A = a_block(basis, alpha, N, n_cols, precision)
        signs = np.where(np.arange(n_cols + 1) % 2, -1.0, 1.0)[None, :]
    else:
        A = a_block(basis.reflected(), alpha, N, n_cols, precision)
        signs = np.where(np.arange(N + 1) % 2, -1.0, 1.0)[:, None]
    return OpMatrix(basis, float(alpha), side, A * signs)


def compose_block(
    basis: JacobiBasis,
    first: float,
    second: float,
    side: Side,
    N: int,
    inner: int,
) -> np.ndarray:
    """Leading (N+1)x(N+1) block of the product T_first · T_second.

    The infinite product equals the matrix of the composed operator; here
    the inner index is cut at ``inner``, which must be large enough for the
    algebraically decaying tail to fall below the accuracy wanted.
    """
    if inner < N:
        raise IndexRangeError(f"inner dimension {inner} is smaller than N = {N}")
    left = assemble(basis, first, side, N, n_cols=inner).entries
    right = assemble(basis, second, side, inner, n_cols=N).entries
    return left @ right


# ---------------------------------------------------------------------------
# Independent check: monomial expansion + power rule + Beta moments.


def _mp_monomials(beta, gamma, L, N):
    """Coefficients c[n][k] with p_n(x) = Σ_k c[n][k] (x-a)^k, n <= N.

    Built from the three-term recurrence in the variable u = x - a, so it
    shares nothing with the closed endpoint sums.
    """
    mp = mpmath.mp
    A, B = gamma, beta
    mu0 = mp.power(2, A + B + 1) * mp.beta(A + 1, B + 1)
    scale = mp.power(L / 2, -(beta + gamma + 1) / 2)
    c0 = scale / mp.sqrt(mu0)

    def diag(n):
        if n == 0:
            return (B - A) / (A + B + 2)
        s = 2 * n + A + B
        return (B * B - A * A) / (s * (s + 2))

    def off(n):  # couples n and n+1
        mm = n + 1
        if mm == 1:
            return 2 / (A + B + 2) * mp.sqrt((1 + A) * (1 + B) / (A + B + 3))
        sm = 2 * mm + A + B
        return 2 / sm * mp.sqrt(mm * (mm + A) * (mm + B) * (mm + A + B) / ((sm - 1) * (sm + 1)))

    # t = 2u/L - 1
    polys = [[c0]]
    for n in range(N):
        cur = polys[n]
        prev = polys[n - 1] if n >= 1 else []
        nxt = [mp.mpf(0)] * (n + 2)
        for k, ck in enumerate(cur):
            nxt[k + 1] += 2 * ck / L
            nxt[k] += (-1 - diag(n)) * ck
        for k, ck in enumerate(prev):
            nxt[k] -= off(n - 1) * ck
        o = off(n)
        polys.append([v / o for v in nxt])
    return polys


@lru_cache(maxsize=64)
def _oracle_cached(beta, gamma, L, alpha, N, dps):
    mp = mpmath.mp
    with mpmath.workdps(dps):
        be, ga, Lm, a = mp.mpf(beta), mp.mpf(gamma), mp.mpf(L), mp.mpf(alpha)
        polys = _mp_monomials(be, ga, Lm, N)
        # I^α (x-a)^k = Γ(k+1)/Γ(k+1+α) (x-a)^(k+α)
        power = [mp.factorial(k) * mp.rgamma(k + 1 + a) for k in range(N + 1)]
        # ∫ (x-a)^(s+α+β) (b-x)^γ dx
        moments = [
            mp.power(Lm, s + a + be + ga + 1) * mp.beta(s + a + be + 1, ga + 1)
            for s in range(2 * N + 1)
        ]
        out = np.zeros((N + 1, N + 1))
        for m in range(N + 1):
            for n in range(N + 1):
                acc = mp.fsum(
                    polys[m][j] * polys[n][k] * power[k] * moments[j + k]
                    for j in range(m + 1)
                    for k in range(n + 1)
                )
                out[m, n] = float(acc)
    out.setflags(write=False)
    return out


def oracle_block(basis: JacobiBasis, alpha: float, side: Side, N: int, dps: int = 80) -> np.ndarray:
    """(p_m, T p_n)_ω for m, n <= N computed without the A-sum formula."""
    _check_side(side)
    if N > ORACLE_MAX_INDEX:
        raise IndexRangeError(f"oracle is limited to indices <= {ORACLE_MAX_INDEX}")
    _check_order(basis if side == "left" else basis.reflected(), alpha)
    if side == "left":
        return _oracle_cached(basis.beta, basis.gamma, basis.length, float(alpha), N, dps)
    # Reflection x -> a+b-x swaps the weights and maps p_n to (-1)^n p_n.
    refl = _oracle_cached(basis.gamma, basis.beta, basis.length, float(alpha), N, dps)
    sgn = np.where(np.arange(N + 1) % 2, -1.0, 1.0)
    return sgn[:, None] * refl * sgn[None, :]


def oracle_entry(basis: JacobiBasis, alpha: float, side: Side, m: int, n: int) -> float:
    """Signed entry (p_m, T p_n)_ω by the independent monomial route."""
    if m < 0 or n < 0:
        raise IndexRangeError(f"indices must be non-negative, got m={m}, n={n}")
    N = max(m, n)
    return float(oracle_block(basis, alpha, side, N)[m, n])


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class SymmetryReport:
    max_asymmetry: float
    """max |A_mn - A_nm| over the block."""
    eq24_violation: float
    """max |(p_m, I p_n) - (-1)^(n+m) (p_n, I p_m)|."""
    even_block_asymmetry: float
    odd_block_asymmetry: float
    N: int

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_asymmetry <= tol


def check_ultraspherical_symmetry(basis: JacobiBasis, alpha: float, N: int) -> SymmetryReport:
    """Measure how far the left operational matrix is from A_mn = A_nm.

    Requires β = γ.
    """
    if basis.beta != basis.gamma:
        raise DomainError("symmetry check needs an ultraspherical basis (beta == gamma)")
    S = assemble(basis, alpha, "left", N).entries
    sgn = np.where(np.arange(N + 1) % 2, -1.0, 1.0)
    A = S * sgn[None, :]  # undo the (-1)^n column signs
    asym = float(np.max(np.abs(A - A.T)))
    parity = (sgn[:, None] * sgn[None, :])
    eq24 = float(np.max(np.abs(S - parity * S.T)))
    even = S[0::2, 0::2]
    odd = S[1::2, 1::2]
    return SymmetryReport(
        max_asymmetry=asym,
        eq24_violation=eq24,
        even_block_asymmetry=float(np.max(np.abs(even - even.T))),
        odd_block_asymmetry=float(np.max(np.abs(odd - odd.T))) if odd.size else 0.0,
        N=N,
    )


def singular_value_report(M: OpMatrix) -> np.ndarray:
    """Singular values of the truncated matrix, largest first."""
    if max(M.shape) > 201:
        raise IndexRangeError("singular value report is limited to N <= 200")
    return np.linalg.svd(M.entries, compute_uv=False)
