"""Linearizing charts for matrices with real simple spectrum.

A matrix ``M`` in the chart of a permutation ``pi`` factors as

    M = Q^T (Y + D) Q,        Q orthogonal with positive leading minors,
    Q = L U,                  L unit lower, U upper with positive diagonal,
    L^{-1} (Y + D) L = Z + D,

where ``D = diag(lambda_{pi(0)}, ..., lambda_{pi(n-1)})`` and ``Y``, ``Z`` are
strictly lower triangular.  The point ``(pi, spectrum, Y, Z)`` determines ``M``
and the Toda flows act linearly on ``Z``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import FlowOverflow, IsoflowError, NotInChart, SingularInput, ZeroMinor
from .linalg_core import (
    GAP_TOLERANCE,
    Permutation,
    Spectrum,
    as_square,
    commutator,
    lq_pos,
    lu_unit,
    qr_pos,
    real_eigen,
    sign_normalize_rows,
)

CHART_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-13


def _frozen(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    A.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """Linearizing coordinates ``(pi, D^pi, Y, Z)`` of a matrix."""

    pi: Permutation
    spectrum: Spectrum
    Y: np.ndarray
    Z: np.ndarray

    def __post_init__(self):
        n = self.spectrum.n
        if self.pi.n != n:
            raise ValueError("permutation and spectrum sizes differ")
        for name in ("Y", "Z"):
            A = _frozen(getattr(self, name))
            if A.shape != (n, n):
                raise ValueError(f"{name} must be {n}x{n}")
            if np.any(np.triu(A) != 0.0):
                raise ValueError(f"{name} must be strictly lower triangular")
            if not np.all(np.isfinite(A)):
                raise ValueError(f"{name} has non-finite entries")
            object.__setattr__(self, name, A)

    @property
    def n(self) -> int:
        return self.spectrum.n

    @property
    def d(self) -> np.ndarray:
        """Chart-ordered diagonal of ``D^pi``."""
        return self.spectrum.ordered(self.pi)

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.d)

    def replace(self, **changes) -> "ChartPoint":
        fields = dict(pi=self.pi, spectrum=self.spectrum, Y=self.Y, Z=self.Z)
        fields.update(changes)
        return ChartPoint(**fields)


def _is_symmetric(M: np.ndarray) -> bool:
    scale = max(np.max(np.abs(M)), np.finfo(float).tiny)
    return np.max(np.abs(M - M.T)) <= SYMMETRY_TOLERANCE * scale


def _reorder_schur(T: np.ndarray, V: np.ndarray, target: np.ndarray):
    """Permute the diagonal of an upper triangular Schur form into ``target``."""
    n = T.shape[0]
    for k in range(n):
        j = k + int(np.argmin(np.abs(np.diag(T)[k:] - target[k])))
        if j != k:
            T, V, info = lapack.dtrexc(T, V, j + 1, k + 1)
            if info != 0:
                raise IsoflowError(f"Schur reordering failed (info={info})")
    return T, V


def schur_frame(M, pi: Permutation, tol: float = CHART_TOLERANCE,
                gap_tolerance: float = GAP_TOLERANCE):
    """Return ``(spectrum, Q, Y)`` with ``M = Q^T (Y + D^pi) Q``.

    Q is orthogonal with positive leading minors.  Raises NotInChart when a
    leading minor of the pi-ordered frame is below ``tol``.
    """
    M = as_square(M)
    n = M.shape[0]
    if pi.n != n:
        raise ValueError("permutation size does not match matrix")
    if _is_symmetric(M):
        S = 0.5 * (M + M.T)
        w, V = np.linalg.eigh(S)
        order = np.argsort(-w, kind="stable")
        spectrum = Spectrum(w[order], gap_tolerance)
        frame = V[:, order][:, list(pi.images)].T
        Y = None
    else:
        spectrum, _ = real_eigen(M, gap_tolerance)
        T, V = scipy.linalg.schur(M.T, output="real")
        T, V = _reorder_schur(T, V, spectrum.ordered(pi))
        frame = V.T
        Y = T.T
    try:
        E, Q = sign_normalize_rows(frame, tol)
    except ZeroMinor as exc:
        raise NotInChart(pi, exc.k) from None
    if Y is None:
        Y = np.zeros((n, n))
    else:
        Y = np.tril(E[:, None] * Y * E[None, :], -1)
    return spectrum, Q, Y


def solve_conjugator(Y, Z, d) -> np.ndarray:
    """Unit lower triangular L with ``L (Z + D) = (Y + D) L``, ``D = diag(d)``.

    Entries are filled one subdiagonal at a time; the simple spectrum keeps
    every divisor ``d_j - d_i`` nonzero.
    """
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    d = np.asarray(d, dtype=float)
    n = d.size
    L = np.eye(n)
    for offset in range(1, n):
        for j in range(n - offset):
            i = j + offset
            ks = slice(j + 1, i)
            acc = Y[i, j] - Z[i, j] + Y[i, ks] @ L[ks, j] - L[i, ks] @ Z[ks, j]
            L[i, j] = acc / (d[j] - d[i])
    return L


def _conjugate_lower(L: np.ndarray, T: np.ndarray) -> np.ndarray:
    """``L^{-1} T L`` by forward substitution."""
    return scipy.linalg.solve_triangular(L, T @ L, lower=True, unit_diagonal=True)


def chart_decompose(M, pi: Permutation | None = None, tol: float = CHART_TOLERANCE,
                    gap_tolerance: float = GAP_TOLERANCE) -> ChartPoint:
    """Linearizing coordinates of ``M`` in the chart of ``pi`` (default identity)."""
    M = as_square(M)
    if pi is None:
        pi = Permutation.identity(M.shape[0])
    spectrum, Q, Y = schur_frame(M, pi, tol, gap_tolerance)
    L, _ = lu_unit(Q, tol=0.0)
    d = spectrum.ordered(pi)
    Z = np.tril(_conjugate_lower(L, Y + np.diag(d)), -1)
    return ChartPoint(pi, spectrum, Y, Z)


def chart_frames(point: ChartPoint):
    """Return ``(M, Q, L, U)`` reconstructed from a chart point."""
    L = solve_conjugator(point.Y, point.Z, point.d)
    try:
        Q, R = qr_pos(L)
    except SingularInput:
        # L is unit lower triangular, so this is loss of range, not singularity
        raise FlowOverflow("chart point is beyond the representable range") from None
    U = scipy.linalg.solve_triangular(R, np.eye(point.n), lower=False)
    M = Q.T @ (point.Y + point.D) @ Q
    return M, Q, L, U


def chart_reconstruct(point: ChartPoint) -> np.ndarray:
    """Inverse chart: the matrix with coordinates ``point``."""
    return chart_frames(point)[0]


def charts_containing(M, tol: float = CHART_TOLERANCE,
                      gap_tolerance: float = GAP_TOLERANCE) -> list:
    """Permutations (lexicographic) whose chart domain contains ``M``."""
    M = as_square(M)
    n = M.shape[0]
    if _is_symmetric(M):
        w, V = np.linalg.eigh(0.5 * (M + M.T))
        Spectrum(np.sort(w)[::-1], gap_tolerance)
        X = V[:, np.argsort(-w, kind="stable")].T
    else:
        _, X = real_eigen(M, gap_tolerance)
    found = []
    for pi in Permutation.all(n):
        _, Q = lq_pos(X[list(pi.images)])
        try:
            sign_normalize_rows(Q, tol)
        except ZeroMinor:
            continue
        found.append(pi)
    return found


def split_tangent(point: ChartPoint, Mdot):
    """Split a tangent vector as ``Q^T Ddot Q + Q^T Ydot Q + [M, A]``.

    Returns ``(Ddot, Ydot, A)`` with Ddot diagonal, Ydot strictly lower
    and A skew-symmetric.
    """
    M, Q, _, _ = chart_frames(point)
    n = point.n
    d = point.d
    Y = point.Y
    N = Q @ np.asarray(Mdot, dtype=float) @ Q.T
    B = np.zeros((n, n))
    # Upper entries of [Y + D, B] involve only upper entries of B farther
    # from the diagonal, so solve from the corner inward.
    for offset in range(n - 1, 0, -1):
        for i in range(n - offset):
            j = i + offset
            acc = N[i, j] - Y[i, :i] @ B[:i, j] + B[i, j + 1 :] @ Y[j + 1 :, j]
            B[i, j] = acc / (d[i] - d[j])
    B = B - B.T
    R = N - commutator(Y + np.diag(d), B)
    Ddot = np.diag(np.diag(R))
    Ydot = np.tril(R, -1)
    return Ddot, Ydot, Q.T @ B @ Q


@dataclass(frozen=True)
class Profile:
    """Up-right closed set of index pairs, stored by the first column per row.

    Row ``i`` of the profile is ``{(i, j) : j >= min_col[i]}`` (0-based).
    """

    n: int
    min_col: tuple

    def __post_init__(self):
        mc = tuple(int(c) for c in self.min_col)
        if len(mc) != self.n:
            raise ValueError("min_col must have one entry per row")
        if any(c > i or c < 0 for i, c in enumerate(mc)):
            raise ValueError("profile must contain the diagonal")
        if any(a > b for a, b in zip(mc, mc[1:])):
            raise ValueError("min_col must be nondecreasing")
        object.__setattr__(self, "min_col", mc)

    def __contains__(self, pair) -> bool:
        i, j = pair
        return j >= self.min_col[i]

    def mask(self) -> np.ndarray:
        cols = np.arange(self.n)[None, :]
        return cols >= np.array(self.min_col)[:, None]

    @classmethod
    def hessenberg(cls, n: int) -> "Profile":
        return cls(n, tuple(max(i - 1, 0) for i in range(n)))

    @classmethod
    def full(cls, n: int) -> "Profile":
        return cls(n, (0,) * n)


def profile_generate(seed, n: int) -> Profile:
    """Smallest profile containing the pairs in ``seed`` (0-based, i >= j)."""
    min_col = list(range(n))
    for i, j in seed:
        if not (0 <= j <= i < n):
            raise ValueError(f"seed pair {(i, j)} out of range or above diagonal")
        for r in range(i + 1):
            min_col[r] = min(min_col[r], j)
    return Profile(n, tuple(min_col))


def profile_of(M, atol: float = 0.0) -> Profile:
    """Smallest profile whose subspace contains ``M``."""
    M = as_square(M)
    seed = [(i, j) for i, j in zip(*np.nonzero(np.abs(np.tril(M)) > atol))]
    return profile_generate(seed, M.shape[0])


def profile_violation(M, p: Profile) -> float:
    """Largest absolute entry of ``M`` outside the profile."""
    M = np.asarray(M, dtype=float)
    off = np.abs(M[~p.mask()])
    return float(off.max()) if off.size else 0.0


def profile_member(M, p: Profile, rtol: float = 1e-12) -> bool:
    M = as_square(M)
    if M.shape[0] != p.n:
        raise ValueError("dimension mismatch")
    scale = max(1.0, float(np.max(np.abs(M))))
    return profile_violation(M, p) <= rtol * scale


def jacobi_detect(point: ChartPoint, rtol: float = 1e-10) -> bool:
    """True iff the point is a Jacobi matrix (Y = 0, Z positive bidiagonal).

    Entries count as zero below ``rtol`` times the size of the coordinates.
    """
    Z = point.Z
    scale = max(1.0, float(np.max(np.abs(point.d))), float(np.max(np.abs(Z))))
    tol = rtol * scale
    if np.max(np.abs(point.Y), initial=0.0) > tol:
        return False
    sub = np.diag(Z, -1)
    rest = np.tril(Z, -2)
    return bool(np.all(sub > tol) and np.max(np.abs(rest), initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class MoserData:
    """Spectrum plus the positive first coordinates of unit eigenvectors."""

    spectrum: Spectrum
    c: np.ndarray

    def __post_init__(self):
        c = _frozen(self.c)
        if c.shape != (self.spectrum.n,):
            raise ValueError("c must have one entry per eigenvalue")
        if np.any(c <= 0):
            raise ValueError("c must be strictly positive")
        if abs(np.dot(c, c) - 1.0) > 1e-12:
            raise ValueError("c must have unit norm")
        object.__setattr__(self, "c", c)


def jacobi_from_moser(data: MoserData) -> np.ndarray:
    """Jacobi matrix from eigenvalues and eigenvector first coordinates."""
    lam = data.spectrum.as_array()
    n = lam.size
    V = np.empty((n, n))
    V[:, 0] = data.c
    for k in range(1, n):
        V[:, k] = lam * V[:, k - 1]
    Q, _ = qr_pos(V)
    J = Q.T @ np.diag(lam) @ Q
    J = 0.5 * (J + J.T)
    return np.triu(np.tril(J, 1), -1)


def moser_data(J) -> MoserData:
    """Inverse of :func:`jacobi_from_moser` for a Jacobi matrix."""
    J = as_square(J)
    w, V = np.linalg.eigh(0.5 * (J + J.T))
    order = np.argsort(-w, kind="stable")
    c = np.abs(V[0, order])
    return MoserData(Spectrum(w[order]), c / np.linalg.norm(c))
