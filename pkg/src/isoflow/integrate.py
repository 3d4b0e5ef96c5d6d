"""Fixed-step classical Runge-Kutta integration and sampled trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Matrices sampled at strictly increasing (or decreasing) times."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 3 or states.shape[0] != times.size:
            raise ValueError("states must be a (k, n, n) stack matching times")
        if times.size > 1:
            steps = np.diff(times)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise ValueError("times must be strictly monotonic")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self):
        return self.times.size

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _rk4_span(f, y, t0, t1, h):
    span = t1 - t0
    if span == 0:
        return y
    steps = int(math.floor(abs(span) / h + 1e-9))
    direction = math.copysign(1.0, span)
    s = t0
    for _ in range(steps):
        y = _rk4_step(f, s, y, direction * h)
        s += direction * h
    rest = t1 - s
    if abs(rest) > 1e-12 * max(1.0, abs(t1)):
        y = _rk4_step(f, s, y, rest)
    return y


def _rk4_step(f, s, y, dt):
    k1 = f(s, y)
    k2 = f(s + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(s + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(s + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4(f, y0, t: float, h: float = 1e-3, samples: int | None = None) -> Trajectory:
    """Integrate ``y' = f(s, y)`` from 0 to ``t`` with fixed step ``h``.

    With ``samples=None`` every step is recorded (the last one shortened to
    land on ``t``).  Otherwise the output holds ``samples`` equally spaced
    times in ``[0, t]`` and each gap is integrated with step ``h``.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    y = np.array(y0, dtype=float)
    if samples is not None:
        if samples < 2:
            raise ValueError("need at least two samples")
        times = np.linspace(0.0, t, samples)
        states = [y]
        for a, b in zip(times, times[1:]):
            y = _rk4_span(f, y, a, b, h)
            states.append(y)
        return Trajectory(times, np.array(states))
    steps = int(math.floor(abs(t) / h + 1e-9))
    direction = math.copysign(1.0, t) if t else 1.0
    times = [0.0]
    states = [y]
    s = 0.0
    for _ in range(steps):
        y = _rk4_step(f, s, y, direction * h)
        s = times[0] + direction * h * (len(times))
        times.append(s)
        states.append(y)
    rest = t - s
    if abs(rest) > 1e-12 * max(1.0, abs(t)):
        y = _rk4_step(f, s, y, rest)
        times.append(t)
        states.append(y)
    return Trajectory(np.array(times), np.array(states))
