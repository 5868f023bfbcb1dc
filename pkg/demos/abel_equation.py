"""Solving I^alpha psi = f in coefficient space and reading the decay regime."""

# %%
import numpy as np

from jacfrac import JacobiBasis
from jacfrac.abel import estimate_decay, residual, solve, zm_condition
from jacfrac.fracops import FracOrder, apply_coeff
from jacfrac.quadrature import CoeffVector, analyze

basis = JacobiBasis.on(0.0, 1.0)

# %% Manufactured solution: psi has geometric coefficients
psi = CoeffVector(basis, 0.5 ** np.arange(25))
f = apply_coeff(psi, FracOrder.integral(0.5), N_out=128)
back = solve(f, 0.5, 24)
print("leading 16 error:", np.max(np.abs(back.coeffs[:16] - psi.coeffs[:16])))
print("residual:", residual(f, CoeffVector(basis, back.coeffs), 0.5))

# %% A non-polynomial right-hand side: f = 2 sqrt(x / pi) has psi = 1
f = analyze(lambda x: 2 * np.sqrt(x / np.pi), basis, N=256, order=512)
psi = solve(f, 0.5, 24)
print("psi_0..psi_3:", psi.coeffs[:4])

# %% Decay regimes for synthetic |psi_m| = m^-lambda
m = np.arange(1, 61, dtype=float)
for lam in (0.3, 1.0, 2.0):
    c = CoeffVector(basis, np.concatenate([[1.0], m**-lam]))
    rep = estimate_decay(c)
    print(f"lambda = {lam}: {rep.regime}, q bound {rep.q_bound}, Omega_3 convergent {zm_condition(c, 3).convergent}")
