"""Toda flows are linear in chart coordinates.

Along M' = [M, Pi_o p(M)] each z_ij is multiplied by exp(t (p(d_i) - p(d_j))).
The closed form is checked against RK4 and then run to its limit.
"""

import numpy as np

from isoflow import (
    ScalarFunction,
    asymptotic_limit,
    chart_decompose,
    chart_reconstruct,
    lax_integrate,
    toda_exact,
)
from isoflow.sampling import random_jacobi
from isoflow.linalg_core import Spectrum

np.set_printoptions(precision=6, suppress=True)
rng = np.random.default_rng(1)
p = ScalarFunction.identity()

J = random_jacobi(rng, 3, Spectrum((7.0, 5.0, 4.0)))
point = chart_decompose(J)
print("Jacobi start:\n", J)

for t in (0.5, 2.0, 10.0, 40.0):
    exact = chart_reconstruct(toda_exact(point, p, t))
    oracle = lax_integrate(J, p, t, 1e-3).final
    print(f"t={t:5.1f}  |closed - RK4| = {np.abs(exact - oracle).max():.2e}  "
          f"|off-diagonal| = {np.abs(exact - np.diag(np.diag(exact))).max():.2e}")

print("limit:\n", asymptotic_limit(point, p))

# Other p give other flows in the same coordinates; p = x^2 converges faster.
sq = ScalarFunction.polynomial(0, 0, 1)
print("\nz after t=1, p=x  :\n", toda_exact(point, p, 1.0).Z)
print("z after t=1, p=x^2:\n", toda_exact(point, sq, 1.0).Z)
