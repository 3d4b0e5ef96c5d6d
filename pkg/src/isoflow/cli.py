"""``isoflow`` command line: decompose, evolve, verify, qrstep."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .charts import (
    CHART_TOLERANCE,
    chart_decompose,
    chart_reconstruct,
    charts_containing,
    jacobi_detect,
    profile_of,
    profile_violation,
    schur_frame,
)
from .errors import FlowOverflow, IsoflowError
from .extended import (
    calc,
    flow19_exact,
    flow19_oracle,
    flow20_exact,
    flow20_oracle,
    qr_step,
    sts_flow,
    toda_log_time1,
)
from .functions import parse_function
from .linalg_core import Permutation, as_square, real_eigen
from .svd import (
    svd_chart_decompose,
    svd_chart_reconstruct,
    svd_chart_signs,
    svd_exact,
    svd_first_chart,
    svd_lax_integrate,
)
from .toda import lax_integrate, toda_exact
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_OVERFLOW = 0, 1, 2, 3
FLOWS = ("toda", "svd", "ext19", "ext20", "sts")
CROSSCHECK_TOLERANCE = 1e-8


class InputError(Exception):
    pass


def _tolerance(args, default):
    if args.tol is not None:
        return args.tol
    env = os.environ.get("ISOFLOW_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise InputError(f"ISOFLOW_TOL is not a number: {env!r}") from None
    return default


def _load_matrix(args) -> np.ndarray:
    if args.input and args.matrix:
        raise InputError("give either --input or --matrix, not both")
    if args.input:
        return as_square(io.read_matrix(args.input))
    if args.matrix:
        return as_square(io.parse_matrix(args.matrix))
    raise InputError("an input matrix is required (--input PATH or --matrix JSON)")


def _load_generator(text, n) -> np.ndarray:
    if text is None:
        return np.zeros((n, n))
    C = io.read_matrix(text) if os.path.exists(text) else io.parse_matrix(text)
    if C.shape != (n, n):
        raise InputError(f"--C must be {n}x{n}")
    return C


def _parse_perm(text, n) -> Permutation:
    try:
        images = [int(v) for v in text.replace(" ", "").split(",")]
        pi = Permutation.from_one_based(images)
    except ValueError as exc:
        raise InputError(f"bad permutation {text!r}: {exc}") from None
    if pi.n != n:
        raise InputError(f"permutation {text!r} has size {pi.n}, matrix has size {n}")
    return pi


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_decompose(args) -> int:
    M = _load_matrix(args)
    tol = _tolerance(args, CHART_TOLERANCE)
    spectrum, _ = real_eigen(M)
    perms = [_parse_perm(args.perm, M.shape[0])] if args.perm else charts_containing(M, tol)
    charts = []
    for pi in perms:
        pt = chart_decompose(M, pi, tol)
        charts.append({
            "perm": list(pi.one_based()),
            "d": [float(v) for v in pt.d],
            "Y": io.matrix_to_json(pt.Y)["rows"],
            "Z": io.matrix_to_json(pt.Z)["rows"],
            "symmetric": bool(not np.any(pt.Y)),
            "upper_triangular": bool(np.max(np.abs(np.tril(M, -1)), initial=0.0) <= tol),
            "jacobi": jacobi_detect(pt),
        })
    _emit(args, io.dumps({"n": M.shape[0], "spectrum": [float(v) for v in spectrum.values],
                          "charts": charts}))
    return EXIT_OK


def _sorted_eigs(M):
    return real_eigen(M)[0].as_array()


def _diagnostics(flow, states, pi, M0):
    """Spectral drift, Y drift and profile violation per sample."""
    if flow == "svd":
        ref = np.linalg.svd(M0, compute_uv=False)
        spec = [float(np.max(np.abs(np.linalg.svd(S, compute_uv=False) - ref))) for S in states]
        ydrift = [0.0] * len(states)
    else:
        ref = _sorted_eigs(M0)
        Y0 = schur_frame(M0, pi)[2]
        spec = [float(np.max(np.abs(_sorted_eigs(S) - ref))) for S in states]
        ydrift = [float(np.max(np.abs(schur_frame(S, pi)[2] - Y0), initial=0.0)) for S in states]
    profile = profile_of(M0)
    prof = [profile_violation(S, profile) for S in states]
    return spec, ydrift, prof


def _evolve_states(args, M0, times):
    n = M0.shape[0]
    flow = args.flow
    p = parse_function(args.p)
    tol = _tolerance(args, CHART_TOLERANCE)
    if flow == "svd":
        q = parse_function(args.q)
        if args.perm:
            left, _, right = args.perm.partition("/")
            if not right:
                raise InputError("svd charts need --perm PI/RHO")
            pi, rho = _parse_perm(left, n), _parse_perm(right, n)
            E = svd_chart_signs(M0, pi, rho, tol)
        else:
            pi, rho, E = svd_first_chart(M0, tol)
        point = svd_chart_decompose(M0, pi, rho, E, tol)
        meta = {"perm": list(pi.one_based()), "rho": list(rho.one_based()), "E": list(E)}
        if args.oracle:
            return svd_lax_integrate(M0, p, q, args.t, args.h, args.samples).states, pi, meta
        return [svd_chart_reconstruct(svd_exact(point, p, q, t)) for t in times], pi, meta
    pi = _parse_perm(args.perm, n) if args.perm else _first_chart(M0, tol)
    point = chart_decompose(M0, pi, tol)
    meta = {"perm": list(pi.one_based())}
    if flow == "toda":
        if args.oracle:
            return lax_integrate(M0, p, args.t, args.h, args.samples).states, pi, meta
        return [chart_reconstruct(toda_exact(point, p, t)) for t in times], pi, meta
    C = _load_generator(args.C, n)
    if flow == "ext19":
        if args.oracle:
            return flow19_oracle(M0, C, args.t, args.h, pi, args.samples).states, pi, meta
        return [chart_reconstruct(flow19_exact(point, C, t)) for t in times], pi, meta
    if flow == "ext20":
        if args.oracle:
            return flow20_oracle(M0, C, args.t, args.h, pi, args.samples).states, pi, meta
        return [chart_reconstruct(flow20_exact(point, C, t)) for t in times], pi, meta
    if args.oracle:
        return flow19_oracle(M0, C, args.t, args.h, pi, args.samples).states, pi, meta
    X = calc(point, C, "Q")
    return [sts_flow(M0, X, t) for t in times], pi, meta


def _first_chart(M, tol) -> Permutation:
    charts = charts_containing(M, tol)
    if not charts:
        raise InputError("matrix lies in no chart")
    return charts[0]


def cmd_evolve(args) -> int:
    if not np.isfinite(args.t):
        raise InputError("--t must be finite")
    if args.samples < 2:
        raise InputError("--samples must be at least 2")
    M0 = _load_matrix(args)
    times = np.linspace(0.0, args.t, args.samples)
    states, pi, meta = _evolve_states(args, M0, times)
    states = np.asarray(states)
    spec, ydrift, prof = _diagnostics(args.flow, states, pi, M0)
    if args.format == "csv":
        text = io.trajectory_csv(times, states, {"spec_drift": spec, "y_drift": ydrift})
    else:
        text = io.dumps({
            "flow": args.flow,
            "method": "oracle" if args.oracle else "closed_form",
            **meta,
            "times": [float(t) for t in times],
            "states": [io.matrix_to_json(S)["rows"] for S in states],
            "spec_drift": spec,
            "y_drift": ydrift,
            "profile_violation": prof,
        })
    _emit(args, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    p = parse_function(args.p)
    q = parse_function(args.q)
    tol = args.tol
    if tol is None and os.environ.get("ISOFLOW_TOL"):
        tol = _tolerance(args, None)
    result = run_suite(args.suite, seed=args.seed, n=args.n, count=args.count,
                       t=args.t, h=args.h, tol=tol, p=p, q=q)
    _emit(args, io.dumps(result.to_json()))
    return EXIT_OK if result.passed else EXIT_FAIL


def _subdiagonal_norm(M) -> float:
    return float(np.linalg.norm(np.tril(M, -1)))


def cmd_qrstep(args) -> int:
    M = _load_matrix(args)
    iterates = [M]
    for _ in range(args.steps):
        iterates.append(qr_step(iterates[-1]))
    report = {
        "steps": args.steps,
        "iterates": [io.matrix_to_json(S)["rows"] for S in iterates],
        "subdiagonal_norm": [_subdiagonal_norm(S) for S in iterates],
    }
    status = EXIT_OK
    if args.crosscheck:
        tol = _tolerance(args, CROSSCHECK_TOLERANCE)
        diff = float(np.max(np.abs(toda_log_time1(M) - qr_step(M))))
        report["crosscheck"] = {"residual": diff, "tolerance": tol, "passed": diff <= tol}
        if diff > tol:
            status = EXIT_FAIL
    _emit(args, io.dumps(report))
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoflow",
                                     description="Linearizing charts and isospectral flows.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, matrix=True):
        if matrix:
            sp.add_argument("--input", help="matrix JSON file")
            sp.add_argument("--matrix", help="inline matrix JSON")
        sp.add_argument("--tol", type=float, default=None,
                        help="tolerance override (also ISOFLOW_TOL)")
        sp.add_argument("--output", help="write to this file instead of stdout")
        sp.add_argument("--seed", type=int, default=1)

    sp = sub.add_parser("decompose", help="chart coordinates of a matrix")
    common(sp)
    sp.add_argument("--perm", help="1-based permutation, e.g. 2,1,3")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("evolve", help="sample a flow trajectory")
    common(sp)
    sp.add_argument("--flow", choices=FLOWS, default="toda")
    sp.add_argument("--perm", help="1-based permutation (PI/RHO for svd)")
    sp.add_argument("--p", default="id")
    sp.add_argument("--q", default="id")
    sp.add_argument("--C", help="lower triangular generator (JSON file or inline)")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--h", type=float, default=1e-3)
    sp.add_argument("--samples", type=int, default=11)
    sp.add_argument("--oracle", action="store_true", help="integrate numerically")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("verify", help="run a cross-validation suite")
    common(sp, matrix=False)
    sp.add_argument("suite", choices=SUITES)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--p", default="id")
    sp.add_argument("--q", default="id")
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--h", type=float, default=1e-3)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("qrstep", help="iterate unshifted QR steps")
    common(sp)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--crosscheck", action="store_true",
                    help="compare one step with the log-generated flow")
    sp.set_defaults(func=cmd_qrstep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not getattr(args, "h", 1.0) > 0:
            raise InputError("--h must be positive")
        return args.func(args)
    except FlowOverflow as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except (IsoflowError, InputError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
