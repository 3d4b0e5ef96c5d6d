"""Flows driven by a fixed lower triangular generator C, and the QR step.

Conjugating C into the frame of M gives flows with explicit solutions:
the conjugator L evolves by exp(tC) L exp(-t diag C) in one case, and
Y + D is conjugated by exp(tC) in the other. The Toda flow of p = log is
special: its time-1 map is a single unshifted QR step.
"""

import numpy as np

from isoflow import (
    ScalarFunction,
    chart_decompose,
    chart_reconstruct,
    flow19_exact,
    flow19_oracle,
    flow20_exact,
    flow20_oracle,
    qr_step,
    toda_exact,
    toda_log_time1,
)
from isoflow.sampling import random_chart_point, random_spd

rng = np.random.default_rng(5)
point = random_chart_point(rng, 3, max_norm=0.5)
M0 = chart_reconstruct(point)
C = np.tril(rng.uniform(-0.5, 0.5, (3, 3)))

for name, exact, oracle in (("L-flow", flow19_exact, flow19_oracle),
                            ("Y-flow", flow20_exact, flow20_oracle)):
    closed = chart_reconstruct(exact(point, C, 1.0))
    numeric = oracle(M0, C, 1.0, 1e-3, pi=point.pi).final
    print(f"{name}: |closed - RK4| at t=1 is {np.abs(closed - numeric).max():.2e}")

# With C = Y + D the L-flow is the Toda flow of p = identity.
same = chart_reconstruct(flow19_exact(point, point.Y + point.D, 0.8))
toda = chart_reconstruct(toda_exact(point, ScalarFunction.identity(), 0.8))
print(f"C = Y + D reproduces Toda: {np.abs(same - toda).max():.2e}")

S = random_spd(rng, 4)
print(f"\nlog-flow time-1 map vs QR step: {np.abs(toda_log_time1(S) - qr_step(S)).max():.2e}")
A, pt = S, chart_decompose(S)
for k in range(1, 4):
    A = qr_step(A)
    flow = chart_reconstruct(toda_exact(pt, ScalarFunction.log(), float(k)))
    print(f"  {k} QR steps vs log flow at t={k}: {np.abs(A - flow).max():.2e}")
