"""Dense real square-matrix primitives.

Factorizations with canonical sign conventions (positive diagonals on the
triangular factors), triangular/skew projections, a real eigensolver for
matrices with real simple spectrum, and a Padé matrix exponential.

Indices are 0-based throughout the Python API.  Minor orders reported in
:class:`~isoflow.errors.ZeroMinor` are block sizes, so they start at 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ComplexSpectrum,
    DegenerateSpectrum,
    SingularInput,
    ZeroMinor,
)

GAP_TOLERANCE = 1e-8
MINOR_TOLERANCE = 1e-12
SINGULAR_RCOND = 1e-13


def as_square(M) -> np.ndarray:
    """Return ``M`` as a finite float square array, or raise ValueError."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``{0, ..., n-1}`` stored by its images.

    The associated matrix satisfies ``P e_i = e_{images[i]}``.
    """

    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {self.images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_one_based(cls, images) -> "Permutation":
        return cls(tuple(int(i) - 1 for i in images))

    @classmethod
    def all(cls, n: int):
        """All permutations of size ``n`` in lexicographic order of images."""
        return [cls(p) for p in itertools.permutations(range(n))]

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __len__(self):
        return len(self.images)

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.n, self.n))
        P[list(self.images), list(range(self.n))] = 1.0
        return P

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def one_based(self) -> tuple:
        return tuple(i + 1 for i in self.images)

    def __str__(self):
        return "(" + ",".join(str(i) for i in self.one_based()) + ")"


@dataclass(frozen=True)
class Spectrum:
    """Real simple spectrum, strictly decreasing."""

    values: tuple
    gap_tolerance: float = GAP_TOLERANCE

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("empty spectrum")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("spectrum has non-finite values")
        for a, b in zip(values, values[1:]):
            if not a - b > self.gap_tolerance * max(1.0, abs(a)):
                raise DegenerateSpectrum(
                    f"eigenvalues {a!r} and {b!r} are not separated "
                    f"(gap tolerance {self.gap_tolerance})"
                )
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)

    def ordered(self, pi: Permutation) -> np.ndarray:
        """Diagonal of ``D^pi``: ``(lambda_{pi(0)}, ..., lambda_{pi(n-1)})``."""
        v = self.as_array()
        return v[list(pi.images)]


def _check_invertible(X: np.ndarray) -> None:
    s = np.linalg.svd(X, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= SINGULAR_RCOND * s[0]:
        raise SingularInput(f"matrix is numerically singular (sigma_min={s[-1]:.3e})")


def qr_pos(X) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization with ``diag(R) > 0``.

    ``Q`` is orthogonal; it has positive leading minors whenever ``X`` does.
    """
    X = as_square(X)
    _check_invertible(X)
    Q, R = np.linalg.qr(X)
    s = np.sign(np.diag(R))
    return Q * s, R * s[:, None]


def lq_pos(X) -> tuple[np.ndarray, np.ndarray]:
    """LQ factorization ``X = L Q`` with ``diag(L) > 0``."""
    X = as_square(X)
    Q, R = qr_pos(X.T)
    return R.T, Q.T


def _row_norm_products(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    out = np.empty(n)
    acc = 1.0
    for k in range(n):
        acc *= np.linalg.norm(X[k, : k + 1])
        out[k] = acc
    return out


def lu_unit(X, tol: float = MINOR_TOLERANCE) -> tuple[np.ndarray, np.ndarray]:
    """Doolittle LU without pivoting: ``X = L U`` with ``diag(L) = 1``.

    Raises ZeroMinor(k) when the k-th leading minor is below
    ``tol`` times the product of the first k (truncated) row norms.
    """
    X = as_square(X)
    n = X.shape[0]
    scale = _row_norm_products(X)
    U = X.copy()
    L = np.eye(n)
    minor = 1.0
    for k in range(n):
        minor *= U[k, k]
        if not abs(minor) > tol * scale[k]:
            raise ZeroMinor(k + 1)
        if k + 1 < n:
            factors = U[k + 1 :, k] / U[k, k]
            L[k + 1 :, k] = factors
            U[k + 1 :, k:] -= np.outer(factors, U[k, k:])
            U[k + 1 :, k] = 0.0
    return L, np.triu(U)


def plu(X) -> tuple[Permutation, np.ndarray, np.ndarray]:
    """Partial-pivoting factorization ``X = P_pi L U``."""
    X = as_square(X)
    _check_invertible(X)
    P, L, U = scipy.linalg.lu(X)
    pi = Permutation(tuple(int(np.argmax(P[:, i])) for i in range(X.shape[0])))
    return pi, L, U


def polar(M) -> tuple[np.ndarray, np.ndarray]:
    """Left polar decomposition ``M = P Q``, P symmetric positive definite."""
    M = as_square(M)
    _check_invertible(M)
    U, s, Vt = np.linalg.svd(M)
    P = (U * s) @ U.T
    return 0.5 * (P + P.T), U @ Vt


def leading_minors(X) -> np.ndarray:
    """Determinants of the top-left k x k blocks, k = 1..n."""
    X = as_square(X)
    return np.array([np.linalg.det(X[:k, :k]) for k in range(1, X.shape[0] + 1)])


def sign_normalize_rows(X, tol: float = MINOR_TOLERANCE) -> tuple[np.ndarray, np.ndarray]:
    """Flip row signs so that every leading minor becomes positive.

    Returns ``(E, E @ X)`` with ``E`` given as a vector of +-1.
    Flipping row k changes the sign of minors k..n, so fixing the rows
    in order settles each minor once.
    """
    X = as_square(X)
    n = X.shape[0]
    scale = _row_norm_products(X)
    minors = leading_minors(X)
    for k in range(n):
        if not abs(minors[k]) > tol * scale[k]:
            raise ZeroMinor(k + 1)
    signs = np.ones(n)
    cum = 1.0
    for k in range(n):
        if minors[k] * cum < 0:
            signs[k] = -1.0
            cum = -cum
    return signs, signs[:, None] * X


def real_eigen(M, gap_tolerance: float = GAP_TOLERANCE, imag_tolerance: float = 1e-10):
    """Eigen-decomposition ``X M = D X`` for a matrix with real simple spectrum.

    Returns ``(spectrum, X)`` where the rows of X are unit-norm left
    eigenvectors ordered by strictly decreasing eigenvalue.
    """
    M = as_square(M)
    scale = max(np.linalg.norm(M, 2), np.finfo(float).tiny)
    if np.array_equal(M, M.T):
        w, V = np.linalg.eigh(M)
        order = np.argsort(-w, kind="stable")
        return Spectrum(w[order], gap_tolerance), V[:, order].T.copy()
    w, V = np.linalg.eig(M)
    if np.max(np.abs(w.imag)) > imag_tolerance * scale:
        raise ComplexSpectrum(f"complex eigenvalues: {w}")
    order = np.argsort(-w.real, kind="stable")
    spectrum = Spectrum(w.real[order], gap_tolerance)
    V = V.real[:, order]
    X = np.linalg.inv(V)
    X /= np.linalg.norm(X, axis=1)[:, None]
    return spectrum, X


# Degree-6 diagonal Padé coefficients c_k = (2m-k)! m! / ((2m)! k! (m-k)!).
_PADE_M = 6
_PADE = [
    math.factorial(2 * _PADE_M - k)
    * math.factorial(_PADE_M)
    / (math.factorial(2 * _PADE_M) * math.factorial(k) * math.factorial(_PADE_M - k))
    for k in range(_PADE_M + 1)
]


def mat_exp(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a (6,6) Padé approximant."""
    A = as_square(A)
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    B = A / (2.0**s)
    I = np.eye(n)
    powers = [I, B]
    for _ in range(2, _PADE_M + 1):
        powers.append(powers[-1] @ B)
    even = sum(_PADE[k] * powers[k] for k in range(0, _PADE_M + 1, 2))
    odd = sum(_PADE[k] * powers[k] for k in range(1, _PADE_M + 1, 2))
    R = np.linalg.solve(even - odd, even + odd)
    for _ in range(s):
        R = R @ R
    return R


def project(M, space: str) -> np.ndarray:
    """Projection onto one summand of ``o + up`` or ``lo0 + up``.

    ``space`` is one of ``"o"``, ``"up"`` (the splitting M = o + up),
    ``"lo0"``, ``"tilde_up"`` (the splitting M = lo0 + up) or ``"diag"``.
    """
    M = np.asarray(M, dtype=float)
    lower = np.tril(M, -1)
    if space == "o":
        return lower - lower.T
    if space == "up":
        return M - (lower - lower.T)
    if space == "lo0":
        return lower
    if space == "tilde_up":
        return np.triu(M)
    if space == "diag":
        return np.diag(np.diag(M))
    raise ValueError(f"unknown subspace {space!r}")


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A
