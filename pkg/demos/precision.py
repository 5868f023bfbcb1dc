"""Why entries at high index need extended precision.

Each entry is an alternating sum whose terms can exceed the result by many
orders of magnitude. The default path detects the cancellation and redoes
those entries in mpmath; the pure double path warns instead.
"""

# %%
import warnings

import numpy as np

from jacfrac import JacobiBasis
from jacfrac.opmatrix import assemble, oracle_block

basis = JacobiBasis.on(0.0, 1.0, 0.5, 0.5)
ref = oracle_block(basis, 0.5, "left", 20)

# %%
auto = assemble(basis, 0.5, "left", 20).entries
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    dbl = assemble(basis, 0.5, "left", 20, precision="double").entries
print("auto   max error:", np.max(np.abs(auto - ref)))
print("double max error:", np.max(np.abs(dbl - ref)))
for w in caught:
    print("warning:", w.message)
