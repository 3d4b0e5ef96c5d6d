"""Straight-line coordinates: the flow moves one coordinate at unit speed.

Pick an anchor entry (i0, j0). After a logarithmic change of variables
the anchor advances by t and every other coordinate is conserved, which
gives dim - 1 conserved quantities.
"""

import numpy as np

from isoflow import (
    ScalarFunction,
    chart_reconstruct,
    conserved_quantities,
    from_straightline,
    lax_integrate,
    to_straightline,
    toda_exact,
)
from isoflow.charts import chart_decompose
from isoflow.linalg_core import Spectrum
from isoflow.sampling import random_chart_point

np.set_printoptions(precision=5, suppress=True)
rng = np.random.default_rng(3)
p = ScalarFunction.polynomial(0, 1, 0, 1)
anchor = (3, 0)

point = random_chart_point(rng, 4, max_norm=1.0, spectrum=Spectrum((1.5, 0.5, -0.5, -1.5)))
w0 = to_straightline(point, anchor, p).W
print("W at t=0:\n", w0)

M = lax_integrate(chart_reconstruct(point), p, 0.7, 1e-3).final
w = to_straightline(chart_decompose(M, point.pi), anchor, p).W
print("W at t=0.7 from the numerical flow minus W at t=0:\n", w - w0)

q0 = conserved_quantities(point, anchor, p)
q1 = conserved_quantities(toda_exact(point, p, 0.7), anchor, p)
print(f"{len(q0)} conserved quantities, max change {np.abs(np.subtract(q1, q0)).max():.1e}")

back = from_straightline(to_straightline(point, anchor, p), p)
print("round trip through straight-line coordinates:", np.abs(back.Z - point.Z).max())
