"""Toda flows ``M' = [M, Pi_o p(M)]``: closed forms in chart coordinates and
an RK4 oracle on the matrices themselves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import ChartPoint, Profile, chart_reconstruct, solve_conjugator
from .errors import FlowOverflow, NonmonotonicFunction, OrderMismatch, ZeroAnchor
from .functions import ScalarFunction
from .integrate import Trajectory, rk4
from .linalg_core import Permutation, Spectrum, as_square, mat_exp, project

EXPONENT_LIMIT = 700.0


def p_of_matrix(M, p: ScalarFunction, t: float = 0.0) -> np.ndarray:
    return p.of_matrix(M, t)


def lax_rhs(M, p: ScalarFunction, t: float = 0.0) -> np.ndarray:
    """``[M, Pi_o p(M)]``."""
    M = np.asarray(M, dtype=float)
    A = project(p.of_matrix(M, t), "o")
    return M @ A - A @ M


def lax_integrate(M0, p: ScalarFunction, t: float, h: float = 1e-3,
                  samples: int | None = None) -> Trajectory:
    """RK4 integration of the Toda flow from ``M0`` over ``[0, t]``."""
    M0 = as_square(M0)
    return rk4(lambda s, M: lax_rhs(M, p, s), M0, t, h, samples)


def _exponents(values: np.ndarray, p: ScalarFunction, t: float) -> np.ndarray:
    """``E[i, j] = int_0^t p(d_i; s) - p(d_j; s) ds``."""
    if np.isinf(t):
        pv = p(values)
        diff = pv[:, None] - pv[None, :]
        with np.errstate(invalid="ignore"):
            E = np.where(diff == 0, 0.0, t * diff)
        return E
    iv = p.integral(values, t)
    return iv[:, None] - iv[None, :]


def _scale_lower(A: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Entrywise ``A * exp(E)`` on the strictly lower part, guarding overflow."""
    mask = np.tril(np.ones_like(A, dtype=bool), -1) & (A != 0)
    if np.any(E[mask] > EXPONENT_LIMIT):
        raise FlowOverflow("closed-form exponent exceeds the representable range")
    out = np.zeros_like(A)
    with np.errstate(under="ignore"):
        out[mask] = A[mask] * np.exp(E[mask])
    return out


def toda_exact(point: ChartPoint, p: ScalarFunction, t: float) -> ChartPoint:
    """Closed-form Toda evolution: ``z_ij(t) = z_ij(0) exp(int p(d_i) - p(d_j))``."""
    E = _exponents(point.d, p, t)
    return point.replace(Z=_scale_lower(np.array(point.Z), E))


def l_evolve(point: ChartPoint, p: ScalarFunction, t: float) -> np.ndarray:
    """Unit lower conjugator ``L(t)`` along the Toda flow.

    ``L(t) = exp(P(Y + D)) L(0) exp(-P(D))`` with ``P = int_0^t p``; for
    symmetric points this is the entrywise scaling of ``L(0)``.
    """
    L0 = solve_conjugator(point.Y, point.Z, point.d)
    E = _exponents(point.d, p, t)
    if not np.any(point.Y):
        return _scale_lower(L0, E) + np.eye(point.n)
    Pd = p.integral(point.d, t)
    if np.max(np.abs(E)) > EXPONENT_LIMIT:
        raise FlowOverflow("closed-form exponent exceeds the representable range")
    PT = p.integral_of_matrix(point.Y + point.D, t)
    L = mat_exp(PT) @ L0 * np.exp(-Pd)[None, :]
    return np.tril(L, -1) + np.eye(point.n)


def asymptotic_limit(point: ChartPoint, p: ScalarFunction) -> np.ndarray:
    """``lim_{t -> inf} M(t)``: the chart point with Z set to zero.

    Requires ``p(d_0) > p(d_1) > ... > p(d_{n-1})`` on the chart-ordered
    spectrum.
    """
    if p.time_dependent:
        raise ValueError("asymptotics need a time-independent p")
    pv = p(point.d)
    if np.any(np.diff(pv) >= 0):
        raise OrderMismatch(
            f"p is not strictly decreasing along the chart order: {pv.tolist()}"
        )
    return chart_reconstruct(point.replace(Z=np.zeros((point.n, point.n))))


@dataclass(frozen=True, eq=False)
class StraightlinePoint:
    """Coordinates in which a Toda flow is unit-speed motion in one variable.

    ``W`` is strictly lower triangular; ``W[anchor]`` is the log-type
    coordinate and the other entries are the normalized ``z_ij``.
    """

    pi: Permutation
    spectrum: Spectrum
    Y: np.ndarray
    anchor: tuple
    sign: int
    W: np.ndarray

    def __post_init__(self):
        i0, j0 = self.anchor
        n = self.spectrum.n
        if not (0 <= j0 < i0 < n):
            raise ValueError(f"anchor {self.anchor} must satisfy 0 <= j0 < i0 < n")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        W = np.array(self.W, dtype=float)
        if not np.all(np.isfinite(W)):
            raise ValueError("W has non-finite entries")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "anchor", (int(i0), int(j0)))

    @property
    def d(self) -> np.ndarray:
        return self.spectrum.ordered(self.pi)

    def replace(self, **changes) -> "StraightlinePoint":
        fields = dict(pi=self.pi, spectrum=self.spectrum, Y=self.Y, anchor=self.anchor,
                      sign=self.sign, W=self.W)
        fields.update(changes)
        return StraightlinePoint(**fields)


def _check_monotonic(p: ScalarFunction, spectrum: Spectrum) -> None:
    if p.time_dependent:
        raise ValueError("straight-line variables need a time-independent p")
    diffs = np.diff(p(spectrum.as_array()))
    if not (np.all(diffs < 0) or np.all(diffs > 0)):
        raise NonmonotonicFunction("p is not strictly monotonic on the spectrum")


def _epsilons(d: np.ndarray, p: ScalarFunction, anchor) -> tuple[np.ndarray, float]:
    pv = p(d)
    i0, j0 = anchor
    gap = pv[i0] - pv[j0]
    return (pv[:, None] - pv[None, :]) / gap, gap


def to_straightline(point: ChartPoint, anchor, p: ScalarFunction) -> StraightlinePoint:
    """Straight-line coordinates of ``point`` in the half-space of ``anchor``."""
    _check_monotonic(p, point.spectrum)
    i0, j0 = anchor
    za = point.Z[i0, j0]
    if za == 0:
        raise ZeroAnchor(f"z at anchor {anchor} is zero")
    eps, gap = _epsilons(point.d, p, anchor)
    log_abs = np.log(abs(za))
    W = np.tril(point.Z * np.exp(-eps * log_abs), -1)
    W[i0, j0] = log_abs / gap
    return StraightlinePoint(point.pi, point.spectrum, np.array(point.Y), (i0, j0),
                             int(np.sign(za)), W)


def from_straightline(sp: StraightlinePoint, p: ScalarFunction) -> ChartPoint:
    """Inverse of :func:`to_straightline`."""
    _check_monotonic(p, sp.spectrum)
    i0, j0 = sp.anchor
    eps, gap = _epsilons(sp.d, p, sp.anchor)
    log_abs = sp.W[i0, j0] * gap
    Z = np.tril(sp.W * np.exp(eps * log_abs), -1)
    Z[i0, j0] = sp.sign * np.exp(log_abs)
    return ChartPoint(sp.pi, sp.spectrum, sp.Y, Z)


def straightline_evolve(sp: StraightlinePoint, t: float) -> StraightlinePoint:
    W = np.array(sp.W)
    W[sp.anchor] += t
    return sp.replace(W=W)


def conserved_quantities(point: ChartPoint, anchor, p: ScalarFunction,
                         symmetric: bool = False, profile: Profile | None = None) -> list:
    """Quantities constant along the p-flow in the anchor's half-space.

    The eigenvalues, the entries of Y (omitted when ``symmetric``) and every
    straight-line coordinate except the anchor's.  With a ``profile`` only
    the coordinates inside it are kept.
    """
    sp = to_straightline(point, anchor, p)
    n = point.n
    out = [float(v) for v in point.spectrum.values]
    pairs = [(i, j) for i in range(n) for j in range(i)]
    if profile is not None:
        pairs = [pair for pair in pairs if pair in profile]
    if not symmetric:
        out.extend(float(point.Y[i, j]) for i in range(n) for j in range(i))
    out.extend(float(sp.W[pair]) for pair in pairs if pair != sp.anchor)
    return out
