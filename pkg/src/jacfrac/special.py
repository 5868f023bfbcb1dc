"""Real Gamma-family functions with sign-tracked logarithmic values.

Products of Gamma and Beta factors in the operational-matrix sums overflow
long before the sums themselves do, so every factor is carried as a
:class:`SignedLogValue` and only converted to a float at summation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError, PoleError

__all__ = [
    "SignedLogValue",
    "is_nonpositive_integer",
    "log_gamma_signed",
    "rgamma",
    "beta",
    "gen_binom",
    "signed_log_arrays",
    "signed_log_sum",
]

# |x - round(x)| below this counts as sitting on a Gamma pole.
POLE_TOL = 1e-12


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(logmag)``.

    ``sign == 0`` encodes an exact zero and ``logmag`` is then ignored.
    """

    sign: int
    logmag: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")

    @classmethod
    def from_float(cls, x: float) -> SignedLogValue:
        if x == 0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    def to_float(self) -> float:
        return float(self)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: SignedLogValue) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            return NotImplemented
        s = self.sign * other.sign
        if s == 0:
            return SignedLogValue(0, -math.inf)
        return SignedLogValue(s, self.logmag + other.logmag)

    def __truediv__(self, other: SignedLogValue) -> SignedLogValue:
        if not isinstance(other, SignedLogValue):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        if self.sign == 0:
            return SignedLogValue(0, -math.inf)
        return SignedLogValue(self.sign * other.sign, self.logmag - other.logmag)

    def __neg__(self) -> SignedLogValue:
        return SignedLogValue(-self.sign, self.logmag)

    def reciprocal(self) -> SignedLogValue:
        return SignedLogValue(1, 0.0) / self

    def __pow__(self, p: float) -> SignedLogValue:
        if self.sign == 0:
            return SignedLogValue(0, -math.inf)
        if self.sign < 0 and p != int(p):
            raise DomainError("fractional power of a negative value")
        sign = self.sign if int(p) % 2 else 1
        return SignedLogValue(sign, p * self.logmag)


def is_nonpositive_integer(x: float, tol: float = POLE_TOL) -> bool:
    """True when ``x`` is (numerically) one of 0, -1, -2, ..."""
    r = round(x)
    return r <= 0 and abs(x - r) < tol


def _gamma_sign(x: float) -> int:
    if x > 0:
        return 1
    # Gamma alternates sign between consecutive negative integers.
    return -1 if math.ceil(-x) % 2 else 1


def log_gamma_signed(x: float) -> SignedLogValue:
    """Return sign(Γ(x)) and ln|Γ(x)|.

    Raises
    ------
    PoleError
        If ``x`` is a non-positive integer.
    """
    x = float(x)
    if is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at x = {x!r}")
    return SignedLogValue(_gamma_sign(x), math.lgamma(x))


def rgamma(x: float) -> float:
    """Reciprocal Gamma 1/Γ(x), an entire function.

    Returns exactly 0.0 at the poles of Γ. The A-matrix sums rely on these
    exact zeros to drop terms.
    """
    x = float(x)
    if is_nonpositive_integer(x):
        return 0.0
    return float(sp.rgamma(x))


def beta(x: float, y: float) -> SignedLogValue:
    """Euler Beta function B(x, y) in signed-log form, for x, y > 0."""
    x, y = float(x), float(y)
    if x <= 0 or y <= 0:
        raise DomainError(f"beta requires positive arguments, got ({x!r}, {y!r})")
    lo, hi = (x, y) if x <= y else (y, x)
    return SignedLogValue(1, float(sp.betaln(lo, hi)))


def gen_binom(eta: float, mu: float) -> float:
    """Generalised binomial Γ(η+1)/Γ(η−μ+1).

    Equals the falling factorial η(η−1)…(η−μ+1) for integer μ ≥ 0 and is
    total in ``mu``: a pole in the denominator gives 0.
    """
    num = log_gamma_signed(eta + 1.0)
    den_arg = eta - mu + 1.0
    if is_nonpositive_integer(den_arg):
        return 0.0
    return float(num / log_gamma_signed(den_arg))


def signed_log_arrays(x) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised sign(Γ(x)), ln|Γ(x)|, with sign 0 at poles.

    Pole entries get ``logmag = +inf`` so that the reciprocal is an exact zero.
    """
    x = np.asarray(x, dtype=float)
    r = np.round(x)
    pole = (r <= 0) & (np.abs(x - r) < POLE_TOL)
    safe = np.where(pole, 0.5, x)
    sign = np.where(pole, 0, sp.gammasgn(safe)).astype(int)
    logmag = np.where(pole, np.inf, sp.gammaln(safe))
    return sign, logmag


def signed_log_sum(signs, logs) -> tuple[float, float]:
    """Sum ``Σ sign_i exp(log_i)`` after scaling by the largest magnitude.

    Returns ``(total, max_abs_term)``. Zero-sign terms are skipped. The
    scaled terms are added with :func:`math.fsum`, so the only error left is
    the rounding of each individual term.
    """
    signs = np.asarray(signs)
    logs = np.asarray(logs, dtype=float)
    live = signs != 0
    if not np.any(live):
        return 0.0, 0.0
    top = float(np.max(logs[live]))
    scaled = signs[live] * np.exp(logs[live] - top)
    return math.fsum(scaled.tolist()) * math.exp(top), math.exp(top)
