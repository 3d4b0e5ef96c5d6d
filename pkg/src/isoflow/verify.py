"""Cross-validation suites comparing closed forms with independent oracles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import chart_decompose, chart_reconstruct
from .extended import flow19_exact, flow19_oracle, flow20_exact, flow20_oracle, qr_step, toda_log_time1
from .functions import ScalarFunction
from .sampling import random_chart_point, random_lower, random_spd, random_svd_point
from .svd import svd_chart_reconstruct, svd_exact, svd_lax_integrate
from .toda import lax_integrate, straightline_evolve, to_straightline, toda_exact

SUITES = ("roundtrip", "toda", "svd", "ext", "qrstep", "straightline")

DEFAULTS = {
    "roundtrip": dict(n=4, count=50, tol=1e-9),
    "toda": dict(n=4, count=4, tol=1e-6, t=1.0),
    "svd": dict(n=3, count=3, tol=1e-6, t=1.0),
    "ext": dict(n=3, count=2, tol=1e-6, t=0.5),
    "qrstep": dict(n=4, count=20, tol=1e-8),
    "straightline": dict(n=4, count=10, tol=1e-8, t=1.0),
}


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass
class SuiteResult:
    suite: str
    settings: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst(self) -> Check | None:
        if not self.checks:
            return None
        return max(self.checks, key=lambda c: c.residual / c.tolerance)

    def to_json(self) -> dict:
        worst = self.worst
        return {
            "suite": self.suite,
            "passed": self.passed,
            "settings": self.settings,
            "checks": [
                {"name": c.name, "residual": float(c.residual), "tolerance": c.tolerance,
                 "passed": c.passed}
                for c in self.checks
            ],
            "failed": [c.name for c in self.checks if not c.passed],
            "worst": None if worst is None else {"name": worst.name,
                                                 "residual": float(worst.residual)},
        }


def _rel(A, B) -> float:
    return float(np.max(np.abs(A - B)) / max(1.0, float(np.max(np.abs(B)))))


def _roundtrip(rng, s, out):
    for k in range(s["count"]):
        pt = random_chart_point(rng, s["n"])
        back = chart_decompose(chart_reconstruct(pt), pt.pi)
        scale = max(1.0, np.max(np.abs(pt.Y)), np.max(np.abs(pt.Z)))
        err = max(np.max(np.abs(back.Y - pt.Y)), np.max(np.abs(back.Z - pt.Z)),
                  np.max(np.abs(back.d - pt.d))) / scale
        out.append(Check(f"roundtrip[{k}]", err, s["tol"]))


def _toda(rng, s, out):
    for k in range(s["count"]):
        pt = random_chart_point(rng, s["n"], max_norm=0.5, symmetric=k % 2 == 0)
        exact = chart_reconstruct(toda_exact(pt, s["p"], s["t"]))
        oracle = lax_integrate(chart_reconstruct(pt), s["p"], s["t"], s["h"]).final
        out.append(Check(f"toda[{k}]", _rel(oracle, exact), s["tol"]))


def _svd(rng, s, out):
    for k in range(s["count"]):
        pt = random_svd_point(rng, s["n"])
        exact = svd_chart_reconstruct(svd_exact(pt, s["p"], s["q"], s["t"]))
        oracle = svd_lax_integrate(svd_chart_reconstruct(pt), s["p"], s["q"], s["t"], s["h"]).final
        out.append(Check(f"svd[{k}]", _rel(oracle, exact), s["tol"]))
        drift = np.max(np.abs(np.linalg.svd(oracle, compute_uv=False) - pt.sigma.as_array()))
        out.append(Check(f"svd_sigma[{k}]", drift, s["tol"]))


def _ext(rng, s, out):
    for k in range(s["count"]):
        pt = random_chart_point(rng, s["n"], max_norm=0.5)
        C = np.diag(rng.uniform(-1, 1, s["n"])) + random_lower(rng, s["n"], 1.0)
        C *= 2.0 / np.linalg.norm(C)
        M0 = chart_reconstruct(pt)
        e19 = chart_reconstruct(flow19_exact(pt, C, s["t"]))
        o19 = flow19_oracle(M0, C, s["t"], s["h"], pi=pt.pi).final
        out.append(Check(f"flow19[{k}]", _rel(o19, e19), s["tol"]))
        e20 = chart_reconstruct(flow20_exact(pt, C, s["t"]))
        o20 = flow20_oracle(M0, C, s["t"], s["h"], pi=pt.pi).final
        out.append(Check(f"flow20[{k}]", _rel(o20, e20), s["tol"]))


def _qrstep(rng, s, out):
    for k in range(s["count"]):
        M = random_spd(rng, s["n"])
        out.append(Check(f"qrstep[{k}]", _rel(toda_log_time1(M), qr_step(M)), s["tol"]))


def _straightline(rng, s, out):
    n = s["n"]
    anchor = (n - 1, 0)
    for k in range(s["count"]):
        pt = random_chart_point(rng, n, max_norm=2.0)
        sp0 = to_straightline(pt, anchor, s["p"])
        moved = to_straightline(toda_exact(pt, s["p"], s["t"]), anchor, s["p"])
        expected = straightline_evolve(sp0, s["t"])
        out.append(Check(f"straightline[{k}]", float(np.max(np.abs(moved.W - expected.W))),
                         s["tol"]))


_RUNNERS = {"roundtrip": _roundtrip, "toda": _toda, "svd": _svd, "ext": _ext,
            "qrstep": _qrstep, "straightline": _straightline}


def run_suite(suite: str, seed: int = 1, n: int | None = None, count: int | None = None,
              t: float | None = None, h: float = 1e-3, tol: float | None = None,
              p: ScalarFunction | None = None, q: ScalarFunction | None = None) -> SuiteResult:
    """Run one named suite; ``None`` arguments take the suite's defaults."""
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if not h > 0:
        raise ValueError("step size must be positive")
    s = dict(DEFAULTS[suite])
    for key, value in (("n", n), ("count", count), ("t", t), ("tol", tol)):
        if value is not None:
            s[key] = value
    s["h"] = h
    s["p"] = p or ScalarFunction.identity()
    s["q"] = q or ScalarFunction.identity()
    result = SuiteResult(suite, {"seed": seed, **{k: (str(v) if k in "pq" else v)
                                                  for k, v in s.items()}})
    _RUNNERS[suite](np.random.default_rng(seed), s, result.checks)
    return result
