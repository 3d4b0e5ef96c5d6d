"""Scalar functions applied to matrices through the functional calculus."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import NonpositiveSpectrum
from .linalg_core import GAP_TOLERANCE, as_square, real_eigen

KINDS = ("polynomial", "log", "exp", "identity")


def _horner_scalar(coefficients, x):
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for c in reversed(coefficients):
        acc = acc * x + c
    return acc


def _horner_matrix(coefficients, M):
    n = M.shape[0]
    acc = np.zeros((n, n))
    I = np.eye(n)
    for c in reversed(coefficients):
        acc = acc @ M + c * I
    return acc


@dataclass(frozen=True)
class ScalarFunction:
    """The function ``p`` of a flow ``M' = [M, Pi_o p(M)]``.

    ``coefficients`` are in increasing degree.  A ``schedule`` is a sequence
    of ``(duration, coefficients)`` segments making p piecewise constant in
    time: segment ``k`` is active on its window, the first segment extends to
    negative times and the last one persists after the schedule ends.
    """

    kind: str = "identity"
    coefficients: tuple = ()
    schedule: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if self.kind == "polynomial" and self.schedule is None and not self.coefficients:
            raise ValueError("polynomial needs at least one coefficient")
        if self.schedule is not None:
            if self.kind != "polynomial":
                raise ValueError("only polynomial functions can be scheduled")
            segs = []
            for dur, coeffs in self.schedule:
                if not dur > 0:
                    raise ValueError("schedule durations must be positive")
                coeffs = tuple(float(c) for c in coeffs)
                if not coeffs:
                    raise ValueError("schedule segment needs coefficients")
                segs.append((float(dur), coeffs))
            if not segs:
                raise ValueError("empty schedule")
            object.__setattr__(self, "schedule", tuple(segs))

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def polynomial(cls, *coefficients):
        return cls("polynomial", coefficients)

    @classmethod
    def log(cls):
        return cls("log")

    @classmethod
    def exp(cls):
        return cls("exp")

    @classmethod
    def scheduled(cls, segments):
        return cls("polynomial", (), tuple(segments))

    @property
    def spectral(self) -> bool:
        return self.kind in ("log", "exp")

    @property
    def time_dependent(self) -> bool:
        return self.schedule is not None

    def _segment(self, t):
        elapsed = 0.0
        for dur, coeffs in self.schedule:
            elapsed += dur
            if t < elapsed:
                return coeffs
        return self.schedule[-1][1]

    def __call__(self, x, t: float = 0.0):
        """Evaluate p at real points ``x`` (at time ``t`` for schedules)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "identity":
            return x.copy()
        if self.kind == "log":
            if np.any(x <= 0):
                raise NonpositiveSpectrum(f"log of nonpositive value in {x}")
            return np.log(x)
        if self.kind == "exp":
            return np.exp(x)
        coeffs = self._segment(t) if self.schedule else self.coefficients
        return _horner_scalar(coeffs, x)

    def integrated_coefficients(self, t: float) -> tuple:
        """Coefficients of ``x -> int_0^t p(x; s) ds`` for polynomial kinds."""
        if self.kind == "identity":
            return (0.0, float(t))
        if self.kind != "polynomial":
            raise ValueError("integrated coefficients need a polynomial")
        if self.schedule is None:
            return tuple(t * c for c in self.coefficients)
        segs = self.schedule
        width = max(len(c) for _, c in segs)
        acc = np.zeros(width)

        def add(weight, coeffs):
            acc[: len(coeffs)] += weight * np.asarray(coeffs)

        if t < 0:
            add(t, segs[0][1])
        else:
            start = 0.0
            for k, (dur, coeffs) in enumerate(segs):
                last = k == len(segs) - 1
                stop = float("inf") if last else start + dur
                overlap = min(t, stop) - start
                if overlap <= 0:
                    break
                add(overlap, coeffs)
                start = stop
        return tuple(acc)

    def integral(self, x, t: float):
        """``int_0^t p(x; s) ds`` evaluated at real points ``x``."""
        if self.schedule is None:
            return t * self(x)
        return _horner_scalar(self.integrated_coefficients(t), x)

    def of_matrix(self, M, t: float = 0.0, gap_tolerance: float = GAP_TOLERANCE):
        """``p(M)``: Horner for polynomials, spectral evaluation for log/exp."""
        M = as_square(M)
        if self.kind == "identity":
            return M.copy()
        if self.kind == "polynomial":
            coeffs = self._segment(t) if self.schedule else self.coefficients
            return _horner_matrix(coeffs, M)
        spectrum, X = real_eigen(M, gap_tolerance)
        values = self(spectrum.as_array())
        return np.linalg.solve(X, values[:, None] * X)

    def integral_of_matrix(self, M, t: float, gap_tolerance: float = GAP_TOLERANCE):
        """``int_0^t p(M; s) ds``."""
        if self.schedule is None:
            return t * self.of_matrix(M, gap_tolerance=gap_tolerance)
        return _horner_matrix(self.integrated_coefficients(t), as_square(M))

    def __str__(self):
        if self.kind == "identity":
            return "id"
        if self.kind in ("log", "exp"):
            return self.kind
        if self.schedule is None:
            return "poly:" + ",".join(repr(c) for c in self.coefficients)
        return ";".join(
            f"({dur!r})poly:" + ",".join(repr(c) for c in coeffs)
            for dur, coeffs in self.schedule
        )


_SEGMENT = re.compile(r"^\(([^)]+)\)\s*poly:(.+)$")


def _parse_coefficients(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise ValueError(f"bad coefficient list {text!r}")
    return tuple(float(p) for p in parts)


def parse_function(text: str) -> ScalarFunction:
    """Parse ``poly:c0,c1,...`` | ``log`` | ``exp`` | ``id`` or a schedule
    ``(dur)poly:...;(dur)poly:...``."""
    text = text.strip()
    if text in ("id", "identity"):
        return ScalarFunction.identity()
    if text == "log":
        return ScalarFunction.log()
    if text == "exp":
        return ScalarFunction.exp()
    if text.startswith("poly:"):
        return ScalarFunction.polynomial(*_parse_coefficients(text[5:]))
    if text.startswith("("):
        segments = []
        for part in text.split(";"):
            m = _SEGMENT.match(part.strip())
            if m is None:
                raise ValueError(f"bad schedule segment {part!r}")
            segments.append((float(m.group(1)), _parse_coefficients(m.group(2))))
        return ScalarFunction.scheduled(segments)
    raise ValueError(f"unknown function spec {text!r}")
