"""Linearizing charts: decompose a matrix, inspect its coordinates, rebuild it.

A matrix with simple real spectrum is written M = Q^T (Y + D) Q, with Q = L U.
Its chart coordinates are the strictly lower Y and Z, where Z + D = L^{-1}(Y + D)L.
"""

import numpy as np

from isoflow import Permutation, chart_decompose, chart_reconstruct, charts_containing

np.set_printoptions(precision=4, suppress=True)

M = np.array([[4.0, 1.0, 0.5], [1.0, 2.0, 0.3], [0.5, 0.3, -1.0]])
point = chart_decompose(M)
print("symmetric input, chart", point.pi.one_based())
print("spectrum in chart order:", point.d)
print("Y (zero for symmetric input):\n", point.Y)
print("Z:\n", point.Z)
print("rebuild error:", np.abs(chart_reconstruct(point) - M).max())

# A non-symmetric matrix has nonzero Y.
rng = np.random.default_rng(0)
X = rng.standard_normal((3, 3))
N = np.linalg.solve(X, np.diag([3.0, 1.0, -2.0]) @ X)
q = chart_decompose(N)
print("\nnon-symmetric input, Y:\n", q.Y)
print("rebuild error:", np.abs(chart_reconstruct(q) - N).max())

# Diagonal matrices sit in exactly one chart: the one sorting their entries.
diag = np.diag([7.0, 4.0, 5.0])
print("\ncharts containing diag(7,4,5):", [p.one_based() for p in charts_containing(diag)])
print("its coordinates there:", chart_decompose(diag, Permutation.from_one_based([1, 3, 2])).Z.any())
