"""Flows generated by conjugating a fixed lower triangular matrix C into the
frames of a chart point, plus QR steps and factorization-based solutions.

For ``M = Q^T (Y + D) Q`` and ``Q = L U`` the extended calculi are
``C_Q = Q^T C Q``, ``C_L = L^{-1} C L`` and ``C_U = U^{-1} C U``.
"""

from __future__ import annotations

import numpy as np

from .charts import (
    ChartPoint,
    _conjugate_lower,
    chart_decompose,
    chart_frames,
    chart_reconstruct,
    charts_containing,
    schur_frame,
    solve_conjugator,
)
from .errors import FlowOverflow, NonpositiveSpectrum, NonUnitConjugator
from .functions import ScalarFunction
from .integrate import Trajectory, rk4
from .linalg_core import Permutation, as_square, mat_exp, project, qr_pos, real_eigen
from .toda import EXPONENT_LIMIT, toda_exact

UNIT_TOLERANCE = 1e-8


def as_lower(C) -> np.ndarray:
    """Validate a generator ``C``: square, finite, zero above the diagonal."""
    C = as_square(C)
    if np.any(np.triu(C, 1) != 0.0):
        raise ValueError("generator must be lower triangular")
    return C


def calc(point: ChartPoint, C, frame: str) -> np.ndarray:
    """Extended calculus of ``C`` in frame ``"Q"``, ``"L"`` or ``"U"``."""
    C = as_lower(C)
    _, Q, L, U = chart_frames(point)
    if frame == "Q":
        return Q.T @ C @ Q
    if frame == "L":
        return _conjugate_lower(L, C)
    if frame == "U":
        return np.linalg.solve(U, C @ U)
    raise ValueError(f"unknown frame {frame!r}")


def _exp_checked(A) -> np.ndarray:
    if np.max(np.abs(np.diag(A)), initial=0.0) > EXPONENT_LIMIT:
        raise FlowOverflow("matrix exponential argument out of range")
    out = mat_exp(A)
    if not np.all(np.isfinite(out)):
        raise FlowOverflow("matrix exponential overflowed")
    return out


def flow19_exact(point: ChartPoint, C, t: float) -> ChartPoint:
    """Closed form of ``M' = [M, Pi_o C_Q(M, C)]``.

    ``L(t) = exp(tC) L(0) exp(-t diag C)``; Y and the spectrum are constant.
    """
    C = as_lower(C)
    L0 = solve_conjugator(point.Y, point.Z, point.d)
    L = _exp_checked(t * C) @ L0 * np.exp(-t * np.diag(C))[None, :]
    if np.max(np.abs(np.diag(L) - 1.0)) > UNIT_TOLERANCE:
        raise NonUnitConjugator("conjugator lost its unit diagonal")
    L = np.tril(L, -1) + np.eye(point.n)
    Z = np.tril(_conjugate_lower(L, point.Y + point.D), -1)
    return point.replace(Z=Z)


def flow20_exact(point: ChartPoint, C, t: float) -> ChartPoint:
    """Closed form of ``M' = [M, C_Q(M, C)]``.

    The frame Q is constant, ``Y + D`` evolves by ``exp(-tC) (Y + D) exp(tC)``
    and ``Z + D = L^{-1} (Y + D) L`` with the initial L.
    """
    C = as_lower(C)
    T = _exp_checked(-t * C) @ (point.Y + point.D) @ _exp_checked(t * C)
    Y = np.tril(T, -1)
    L0 = solve_conjugator(point.Y, point.Z, point.d)
    Z = np.tril(_conjugate_lower(L0, Y + point.D), -1)
    return point.replace(Y=Y, Z=Z)


def _default_chart(M0) -> Permutation:
    charts = charts_containing(M0)
    return charts[0]


def flow19_oracle(M0, C, t: float, h: float = 1e-3, pi: Permutation | None = None,
                  samples: int | None = None) -> Trajectory:
    """RK4 on ``M' = [M, Pi_o Q^T C Q]`` with Q recomputed from each state."""
    M0 = as_square(M0)
    C = as_lower(C)
    pi = pi or _default_chart(M0)

    def rhs(s, M):
        _, Q, _ = schur_frame(M, pi)
        A = project(Q.T @ C @ Q, "o")
        return M @ A - A @ M

    return rk4(rhs, M0, t, h, samples)


def flow20_oracle(M0, C, t: float, h: float = 1e-3, pi: Permutation | None = None,
                  samples: int | None = None) -> Trajectory:
    """RK4 on ``M' = [M, Q^T C Q]`` with Q recomputed from each state."""
    M0 = as_square(M0)
    C = as_lower(C)
    pi = pi or _default_chart(M0)

    def rhs(s, M):
        _, Q, _ = schur_frame(M, pi)
        A = Q.T @ C @ Q
        return M @ A - A @ M

    return rk4(rhs, M0, t, h, samples)


def sts_flow(M0, X, t: float) -> np.ndarray:
    """``Q(t)^T M0 Q(t)`` where ``exp(tX) = Q(t) R(t)``."""
    M0 = as_square(M0)
    Q, _ = qr_pos(mat_exp(t * as_square(X)))
    return Q.T @ M0 @ Q


def qr_step(M) -> np.ndarray:
    """One unshifted QR step ``M = QR -> RQ`` (positive-diagonal R)."""
    Q, R = qr_pos(M)
    return R @ Q


def toda_log_time1(M, pi: Permutation | None = None) -> np.ndarray:
    """Time-1 map of the Toda flow generated by ``p(x) = log x``."""
    M = as_square(M)
    spectrum, _ = real_eigen(M)
    if spectrum.values[-1] <= 0:
        raise NonpositiveSpectrum("log flow needs a positive spectrum")
    pi = pi or _default_chart(M)
    point = chart_decompose(M, pi)
    return chart_reconstruct(toda_exact(point, ScalarFunction.log(), 1.0))
