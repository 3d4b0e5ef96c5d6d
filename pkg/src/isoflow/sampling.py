"""Random generic inputs for property checks, verification suites and demos."""

from __future__ import annotations

import numpy as np

from .charts import ChartPoint, MoserData, chart_reconstruct, jacobi_from_moser
from .linalg_core import Permutation, Spectrum
from .svd import SvdChartPoint


def random_spectrum(rng, n: int, low: float = 0.5, high: float = 2.0,
                    start: float | None = None) -> Spectrum:
    """Decreasing values whose consecutive gaps are uniform in ``[low, high]``."""
    gaps = rng.uniform(low, high, size=n - 1)
    top = rng.uniform(-1.0, 3.0) if start is None else start
    return Spectrum(top - np.concatenate([[0.0], np.cumsum(gaps)]))


def random_lower(rng, n: int, norm: float) -> np.ndarray:
    """Strictly lower triangular matrix with Frobenius norm ``norm``."""
    A = np.tril(rng.standard_normal((n, n)), -1)
    size = np.linalg.norm(A)
    return A * (norm / size) if size > 0 else A


def random_chart_point(rng, n: int, max_norm: float = 5.0, symmetric: bool = False,
                       pi: Permutation | None = None,
                       spectrum: Spectrum | None = None) -> ChartPoint:
    if pi is None:
        pi = Permutation(tuple(int(k) for k in rng.permutation(n)))
    spectrum = spectrum or random_spectrum(rng, n)
    Y = np.zeros((n, n)) if symmetric else random_lower(rng, n, rng.uniform(0, max_norm))
    Z = random_lower(rng, n, rng.uniform(0, max_norm))
    return ChartPoint(pi, spectrum, Y, Z)


def random_jacobi(rng, n: int, spectrum: Spectrum | None = None) -> np.ndarray:
    """Jacobi matrix with the given (or a random) spectrum and random weights."""
    spectrum = spectrum or random_spectrum(rng, n)
    c = rng.uniform(0.2, 1.0, size=n)
    return jacobi_from_moser(MoserData(spectrum, c / np.linalg.norm(c)))


def random_spd(rng, n: int) -> np.ndarray:
    """Symmetric positive definite matrix with well separated eigenvalues."""
    spectrum = random_spectrum(rng, n, start=rng.uniform(2.0 * n, 3.0 * n))
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    M = Q @ np.diag(spectrum.as_array()) @ Q.T
    return 0.5 * (M + M.T)


def random_svd_point(rng, n: int, max_norm: float = 1.0,
                     sigma: Spectrum | None = None) -> SvdChartPoint:
    """Point in a random SVD chart.

    Default singular values have gaps in ``[0.4, 0.8]`` above a floor of 0.3,
    which keeps quadratic generators non-stiff for small n.
    """
    if sigma is None:
        gaps = rng.uniform(0.4, 0.8, size=n - 1)
        sigma = Spectrum(0.3 + np.concatenate([np.cumsum(gaps[::-1])[::-1], [0.0]]))
    pi = Permutation(tuple(int(k) for k in rng.permutation(n)))
    rho = Permutation(tuple(int(k) for k in rng.permutation(n)))
    E = tuple(int(e) for e in rng.choice([-1, 1], size=n))
    return SvdChartPoint(pi, rho, E, sigma, random_lower(rng, n, rng.uniform(0, max_norm)),
                         random_lower(rng, n, rng.uniform(0, max_norm)))


def random_in_chart_matrix(rng, n: int, max_norm: float = 1.0) -> np.ndarray:
    return chart_reconstruct(random_chart_point(rng, n, max_norm))
