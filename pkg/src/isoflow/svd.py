"""Charts on matrices with fixed simple singular values and the SVD flows

    M' = M Pi_o p(M^T M) - Pi_o q(M M^T) M.

A matrix in the chart ``(pi, rho, E)`` factors uniquely as
``M = Q^T P_pi^T Sigma E P_rho U`` with Q, U orthogonal with positive leading
minors.  Its coordinates are the symmetric-chart Z's of
``S_pi = Q^T Sigma^pi Q`` and ``S_rho = U^T Sigma^rho U``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import CHART_TOLERANCE, _conjugate_lower, _frozen, solve_conjugator
from .errors import (
    DegenerateSingularValues,
    DegenerateSpectrum,
    FlowOverflow,
    NotInSvdChart,
    SingularInput,
    ZeroMinor,
)
from .functions import ScalarFunction
from .integrate import Trajectory, rk4
from .linalg_core import (
    GAP_TOLERANCE,
    Permutation,
    Spectrum,
    as_square,
    lu_unit,
    polar,
    project,
    qr_pos,
    sign_normalize_rows,
)
from .toda import _exponents, _scale_lower

MAX_SEARCH_DIM = 4


@dataclass(frozen=True, eq=False)
class SvdChartPoint:
    pi: Permutation
    rho: Permutation
    E: tuple
    sigma: Spectrum
    Z_left: np.ndarray
    Z_right: np.ndarray

    def __post_init__(self):
        n = self.sigma.n
        if self.pi.n != n or self.rho.n != n:
            raise ValueError("permutation sizes must match the singular values")
        if self.sigma.values[-1] <= 0:
            raise ValueError("singular values must be positive")
        E = tuple(int(e) for e in self.E)
        if len(E) != n or any(e not in (1, -1) for e in E):
            raise ValueError("E must be a vector of +-1")
        object.__setattr__(self, "E", E)
        for name in ("Z_left", "Z_right"):
            A = _frozen(getattr(self, name))
            if A.shape != (n, n) or np.any(np.triu(A) != 0.0):
                raise ValueError(f"{name} must be strictly lower triangular {n}x{n}")
            object.__setattr__(self, name, A)

    @property
    def n(self) -> int:
        return self.sigma.n

    def replace(self, **changes) -> "SvdChartPoint":
        fields = dict(pi=self.pi, rho=self.rho, E=self.E, sigma=self.sigma,
                      Z_left=self.Z_left, Z_right=self.Z_right)
        fields.update(changes)
        return SvdChartPoint(**fields)


def polar_split(M) -> tuple[np.ndarray, np.ndarray]:
    """``M = S W`` with S symmetric positive definite and W orthogonal."""
    return polar(M)


def _singular_values(M, gap_tolerance):
    u, s, vh = np.linalg.svd(M)
    if not s[-1] > 1e-13 * s[0]:
        raise DegenerateSingularValues("matrix is singular")
    try:
        sigma = Spectrum(s, gap_tolerance)
    except DegenerateSpectrum as exc:
        raise DegenerateSingularValues(str(exc)) from None
    return u, sigma, vh


def _frames(u, vh, pi, rho, tol):
    """Sign-normalized frames and the induced middle sign pattern, or None."""
    try:
        F, Q = sign_normalize_rows(u.T[list(pi.images)], tol)
        G, U = sign_normalize_rows(vh[list(rho.images)], tol)
    except ZeroMinor:
        return None
    E = np.empty(len(F))
    E[list(pi.images)] = F
    Eright = np.empty(len(G))
    Eright[list(rho.images)] = G
    return Q, U, tuple(int(e) for e in E * Eright)


def _z_of(frame, d):
    L, _ = lu_unit(frame, tol=0.0)
    return np.tril(_conjugate_lower(L, np.diag(d)), -1)


def svd_chart_decompose(M, pi: Permutation, rho: Permutation, E,
                        tol: float = CHART_TOLERANCE,
                        gap_tolerance: float = GAP_TOLERANCE) -> SvdChartPoint:
    M = as_square(M)
    u, sigma, vh = _singular_values(M, gap_tolerance)
    E = tuple(int(e) for e in E)
    frames = _frames(u, vh, pi, rho, tol)
    if frames is None:
        raise NotInSvdChart(pi, rho, E, "a leading minor of a frame vanishes")
    Q, U, E_found = frames
    if E_found != E:
        raise NotInSvdChart(pi, rho, E, f"sign pattern is {E_found}")
    s = sigma.as_array()
    return SvdChartPoint(pi, rho, E, sigma, _z_of(Q, s[list(pi.images)]),
                         _z_of(U, s[list(rho.images)]))


def svd_frames(point: SvdChartPoint):
    """Return ``(M, Q, U)`` for a chart point."""
    s = point.sigma.as_array()
    Lq = solve_conjugator(np.zeros((point.n,) * 2), point.Z_left, s[list(point.pi.images)])
    Lu = solve_conjugator(np.zeros((point.n,) * 2), point.Z_right, s[list(point.rho.images)])
    try:
        Q, _ = qr_pos(Lq)
        U, _ = qr_pos(Lu)
    except SingularInput:
        raise FlowOverflow("chart point is beyond the representable range") from None
    middle = point.pi.matrix().T @ np.diag(s * np.array(point.E)) @ point.rho.matrix()
    return Q.T @ middle @ U, Q, U


def svd_chart_reconstruct(point: SvdChartPoint) -> np.ndarray:
    return svd_frames(point)[0]


def svd_charts_containing(M, tol: float = CHART_TOLERANCE,
                          gap_tolerance: float = GAP_TOLERANCE) -> list:
    """All ``(pi, rho, E)`` whose chart contains ``M`` (n <= 4).

    Each pair (pi, rho) admits at most one sign pattern E, which the frame
    normalization determines.
    """
    M = as_square(M)
    n = M.shape[0]
    if n > MAX_SEARCH_DIM:
        raise ValueError(f"exhaustive chart search is limited to n <= {MAX_SEARCH_DIM}")
    u, _, vh = _singular_values(M, gap_tolerance)
    found = []
    perms = Permutation.all(n)
    for pi in perms:
        for rho in perms:
            frames = _frames(u, vh, pi, rho, tol)
            if frames is not None:
                found.append((pi, rho, frames[2]))
    return found


def gram_coordinates(point: SvdChartPoint) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric-chart Z's of ``M M^T`` (chart pi) and ``M^T M`` (chart rho)."""
    n = point.n
    s = point.sigma.as_array()
    out = []
    for perm, Z in ((point.pi, point.Z_left), (point.rho, point.Z_right)):
        d = s[list(perm.images)]
        L = solve_conjugator(np.zeros((n, n)), Z, d)
        out.append(np.tril(_conjugate_lower(L, np.diag(d**2)), -1))
    return out[0], out[1]


def svd_rhs(M, p: ScalarFunction, q: ScalarFunction, t: float = 0.0) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    right = project(p.of_matrix(M.T @ M, t), "o")
    left = project(q.of_matrix(M @ M.T, t), "o")
    return M @ right - left @ M


def svd_lax_integrate(M0, p: ScalarFunction, q: ScalarFunction, t: float,
                      h: float = 1e-3, samples: int | None = None) -> Trajectory:
    M0 = as_square(M0)
    return rk4(lambda s, M: svd_rhs(M, p, q, s), M0, t, h, samples)


def svd_exact(point: SvdChartPoint, p: ScalarFunction, q: ScalarFunction,
              t: float) -> SvdChartPoint:
    """Closed form: two decoupled Toda flows on the Gram matrices.

    ``M M^T`` follows the q-flow and ``M^T M`` the p-flow, both with
    spectrum ``sigma**2``; each chart coordinate scales entrywise.
    """
    s2 = point.sigma.as_array() ** 2
    El = _exponents(s2[list(point.pi.images)], q, t)
    Er = _exponents(s2[list(point.rho.images)], p, t)
    return point.replace(Z_left=_scale_lower(np.array(point.Z_left), El),
                         Z_right=_scale_lower(np.array(point.Z_right), Er))


def svd_first_chart(M, tol: float = CHART_TOLERANCE, gap_tolerance: float = GAP_TOLERANCE):
    """First ``(pi, rho, E)`` in lexicographic order whose chart contains ``M``."""
    M = as_square(M)
    u, _, vh = _singular_values(M, gap_tolerance)
    perms = Permutation.all(M.shape[0])
    for pi in perms:
        for rho in perms:
            frames = _frames(u, vh, pi, rho, tol)
            if frames is not None:
                return pi, rho, frames[2]
    raise NotInSvdChart(None, None, (), "no chart contains the matrix")


def svd_chart_signs(M, pi: Permutation, rho: Permutation, tol: float = CHART_TOLERANCE,
                    gap_tolerance: float = GAP_TOLERANCE) -> tuple:
    """The unique E with ``M`` in the chart ``(pi, rho, E)``."""
    u, _, vh = _singular_values(as_square(M), gap_tolerance)
    frames = _frames(u, vh, pi, rho, tol)
    if frames is None:
        raise NotInSvdChart(pi, rho, (), "a leading minor of a frame vanishes")
    return frames[2]
