"""Operational matrices of I^alpha and D^alpha in shifted Jacobi bases."""

# %%
import math

import numpy as np

from jacfrac import JacobiBasis
from jacfrac.opmatrix import assemble, check_ultraspherical_symmetry, oracle_block, singular_value_report

basis = JacobiBasis.on(0.0, 1.0)
M = assemble(basis, 0.5, "left", 6)
print("entry (0,0):", M.entries[0, 0], " closed form:", 4 / (3 * math.sqrt(math.pi)))

# %% Agreement with the monomial oracle, integral and derivative entries
for bg in [(0.0, 0.0), (0.5, 0.5), (0.3, 0.3)]:
    b = JacobiBasis.on(-1.0, 2.0, *bg)
    for alpha in (0.5, -0.5):
        err = np.max(np.abs(assemble(b, alpha, "left", 12).entries - oracle_block(b, alpha, "left", 12)))
        print(f"(beta, gamma) = {bg}, alpha = {alpha:+}: max difference {err:.1e}")

# %% Symmetry A_mn = A_nm holds for Legendre only
for beta in (0.0, 0.3, 0.5):
    rep = check_ultraspherical_symmetry(JacobiBasis.on(0.0, 1.0, beta, beta), 0.5, 12)
    print(f"beta = gamma = {beta}: max asymmetry {rep.max_asymmetry:.2e}")

# %% Singular values of the truncated integral matrix decay algebraically
sv = singular_value_report(assemble(basis, 0.5, "left", 60))
print("sigma_0, sigma_30, sigma_60:", sv[0], sv[30], sv[60])
