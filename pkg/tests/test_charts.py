import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoflow.charts import (
    ChartPoint,
    MoserData,
    Profile,
    chart_decompose,
    chart_frames,
    chart_reconstruct,
    charts_containing,
    jacobi_detect,
    jacobi_from_moser,
    moser_data,
    profile_generate,
    profile_member,
    profile_of,
    solve_conjugator,
    split_tangent,
)
from isoflow.errors import ComplexSpectrum, NotInChart
from isoflow.linalg_core import Permutation, Spectrum, commutator, leading_minors
from isoflow.sampling import random_chart_point, random_jacobi, random_lower

ID2, ID3 = Permutation.identity(2), Permutation.identity(3)


def point(spec, Z, Y=None, pi=None):
    n = len(spec)
    Z = np.array(Z, dtype=float)
    return ChartPoint(pi or Permutation.identity(n), Spectrum(spec),
                      np.zeros((n, n)) if Y is None else np.array(Y, dtype=float), Z)


def test_chart_point_validation():
    with pytest.raises(ValueError):
        ChartPoint(ID2, Spectrum((6, 4)), np.zeros((2, 2)), np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        ChartPoint(ID3, Spectrum((6, 4)), np.zeros((2, 2)), np.zeros((2, 2)))
    pt = point((6, 4), [[0, 0], [2, 0]])
    with pytest.raises(ValueError):
        pt.Z[1, 0] = 5.0


class TestDecompose:
    def test_diagonal(self):
        pt = chart_decompose(np.diag([7.0, 5.0, 4.0]), ID3)
        assert pt.spectrum.values == (7, 5, 4)
        assert not np.any(pt.Y) and not np.any(pt.Z)

    def test_symmetric_two_by_two(self):
        pt = chart_decompose([[5.0, 1.0], [1.0, 5.0]], ID2)
        assert np.allclose(pt.spectrum.values, (6, 4))
        assert not np.any(pt.Y)
        assert pt.Z[1, 0] == pytest.approx(2.0, abs=1e-14)

    def test_other_vertex_lies_in_transposition_chart(self):
        M = np.diag([7.0, 4.0, 5.0])
        with pytest.raises(NotInChart) as exc:
            chart_decompose(M, ID3)
        assert exc.value.k == 2
        pt = chart_decompose(M, Permutation.from_one_based([1, 3, 2]))
        assert not np.any(pt.Z) and list(pt.d) == [7, 4, 5]

    def test_complex_spectrum(self):
        with pytest.raises(ComplexSpectrum):
            chart_decompose([[0.0, -1.0], [1.0, 0.0]])

    def test_symmetry_and_triangularity_characterizations(self, rng):
        for _ in range(20):
            pt = random_chart_point(rng, 4, max_norm=2.0)
            M = chart_reconstruct(pt)
            sym = chart_decompose(0.5 * (M + M.T) + np.diag([9.0, 3.0, -3.0, -9.0]))
            assert np.max(np.abs(sym.Y)) <= 1e-9
            assert np.linalg.norm(M - M.T) > 1e-9 * np.linalg.norm(M) or not np.any(pt.Y)
            U = np.triu(rng.standard_normal((4, 4)), 1) + np.diag(pt.d)
            up = chart_decompose(U, pt.pi)
            assert np.max(np.abs(up.Z)) <= 1e-9 * np.linalg.norm(U)


class TestReconstruct:
    def test_examples(self):
        assert np.allclose(chart_reconstruct(point((7, 5, 4), np.zeros((3, 3)))),
                           np.diag([7, 5, 4]))
        assert np.allclose(chart_reconstruct(point((6, 4), [[0, 0], [2, 0]])),
                           [[5, 1], [1, 5]], atol=1e-14)
        assert np.allclose(chart_reconstruct(point((6, 4), np.zeros((2, 2)))), np.diag([6, 4]))

    def test_frames(self, rng):
        pt = random_chart_point(rng, 5, max_norm=2.0)
        M, Q, L, U = chart_frames(pt)
        assert np.allclose(Q @ Q.T, np.eye(5), atol=1e-13)
        assert np.all(leading_minors(Q) > 0)
        assert np.allclose(L @ U, Q, atol=1e-12)
        assert np.allclose(Q.T @ (pt.Y + pt.D) @ Q, M)
        assert np.allclose(np.sort(np.linalg.eigvals(M).real)[::-1], pt.spectrum.values)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_round_trip(self, n, seed):
        pt = random_chart_point(np.random.default_rng(seed), n)
        back = chart_decompose(chart_reconstruct(pt), pt.pi)
        scale = max(1.0, np.abs(pt.Y).max(), np.abs(pt.Z).max())
        assert np.max(np.abs(back.Y - pt.Y)) <= 1e-9 * scale
        assert np.max(np.abs(back.Z - pt.Z)) <= 1e-9 * scale


class TestSolveConjugator:
    def test_examples(self, rng):
        Y = random_lower(rng, 3, 1.0)
        assert np.allclose(solve_conjugator(Y, Y, np.array([3.0, 1.0, -2.0])), np.eye(3))
        L = solve_conjugator(np.zeros((2, 2)), np.array([[0, 0], [2.0, 0]]), np.array([6.0, 4.0]))
        assert L[1, 0] == pytest.approx(-1.0)

    def test_intertwining(self, rng):
        for n in range(2, 7):
            d = np.sort(rng.uniform(-3, 3, n)) + 0.5 * np.arange(n)
            d = rng.permutation(d)
            Y, Z = random_lower(rng, n, 1.0), random_lower(rng, n, 1.0)
            L = solve_conjugator(Y, Z, d)
            assert np.array_equal(np.diag(L), np.ones(n))
            assert np.allclose(L @ (Z + np.diag(d)), (Y + np.diag(d)) @ L, atol=1e-12)


class TestChartsContaining:
    def test_diagonal_vertex(self):
        assert charts_containing(np.diag([7.0, 5.0, 4.0])) == [ID3]

    def test_jacobi_in_every_chart(self, rng):
        J = random_jacobi(rng, 3, Spectrum((7, 5, 4)))
        assert charts_containing(J) == Permutation.all(3)

    def test_upper_triangular(self, rng):
        U = np.triu(rng.standard_normal((3, 3)), 1) + np.diag([7.0, 5.0, 4.0])
        assert ID3 in charts_containing(U)

    def test_agrees_with_decompose(self, rng):
        M = np.diag([3.0, 1.0, 2.0, 0.0])
        M[2, 1] = 0.7
        found = charts_containing(M)
        for pi in Permutation.all(4):
            try:
                chart_decompose(M, pi)
                ok = True
            except NotInChart:
                ok = False
            assert ok == (pi in found)


def _direct_split(point, Mdot):
    """Solve the n^2 x n^2 system for (Ddot, Ydot, A) directly."""
    M, Q, _, _ = chart_frames(point)
    n = point.n
    basis = []
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1
        basis.append(("D", E, Q.T @ E @ Q))
    for i, j in itertools.combinations(range(n), 2):
        E = np.zeros((n, n))
        E[j, i] = 1
        basis.append(("Y", E, Q.T @ E @ Q))
    for i, j in itertools.combinations(range(n), 2):
        S = np.zeros((n, n))
        S[j, i], S[i, j] = 1, -1
        basis.append(("A", S, commutator(M, S)))
    coeffs = np.linalg.solve(np.array([b[2].ravel() for b in basis]).T, Mdot.ravel())
    parts = {"D": np.zeros((n, n)), "Y": np.zeros((n, n)), "A": np.zeros((n, n))}
    for c, (kind, E, _) in zip(coeffs, basis):
        parts[kind] += c * E
    return parts["D"], parts["Y"], parts["A"]


class TestSplitTangent:
    def test_commutator_direction(self, rng):
        pt = random_chart_point(rng, 4, max_norm=1.0)
        M = chart_reconstruct(pt)
        B = rng.standard_normal((4, 4))
        B = B - B.T
        Dd, Yd, A = split_tangent(pt, commutator(M, B))
        assert np.allclose(Dd, 0, atol=1e-10) and np.allclose(Yd, 0, atol=1e-10)
        assert np.allclose(A, B, atol=1e-10)

    def test_identity_direction(self, rng):
        pt = random_chart_point(rng, 3, max_norm=1.0)
        _, Q, _, _ = chart_frames(pt)
        Dd, Yd, A = split_tangent(pt, Q.T @ np.eye(3) @ Q)
        assert np.allclose(Dd, np.eye(3)) and np.allclose(Yd, 0) and np.allclose(A, 0, atol=1e-12)

    def test_matches_direct_solve(self, rng):
        for _ in range(10):
            pt = random_chart_point(rng, 4, max_norm=2.0)
            M, Q, _, _ = chart_frames(pt)
            Mdot = rng.standard_normal((4, 4))
            Dd, Yd, A = split_tangent(pt, Mdot)
            assert np.allclose(Q.T @ Dd @ Q + Q.T @ Yd @ Q + commutator(M, A), Mdot, atol=1e-9)
            assert np.array_equal(Dd, np.diag(np.diag(Dd)))
            assert np.array_equal(Yd, np.tril(Yd, -1))
            assert np.allclose(A, -A.T)
            for mine, ref in zip((Dd, Yd, A), _direct_split(pt, Mdot)):
                assert np.allclose(mine, ref, atol=1e-8)


class TestProfiles:
    def test_generate_examples(self):
        assert profile_generate({(1, 0), (2, 1)}, 3).min_col == (0, 0, 1)
        assert profile_generate({(1, 0), (2, 1)}, 3) == Profile.hessenberg(3)
        assert profile_generate({(4, 0)}, 5) == Profile.full(5)
        assert profile_generate({(0, 0)}, 4).min_col == (0, 1, 2, 3)
        with pytest.raises(ValueError):
            profile_generate({(0, 1)}, 3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Profile(3, (0, 1, 0))
        with pytest.raises(ValueError):
            Profile(3, (0, 2, 2))

    def test_membership(self, rng):
        H = Profile.hessenberg(3)
        T = np.diag([1.0, 2, 3]) + np.diag([1.0, 1], 1) + np.diag([1.0, 1], -1)
        assert profile_member(T, H)
        M = T.copy()
        M[2, 0] = 0.5
        assert not profile_member(M, H)
        U = np.triu(rng.standard_normal((3, 3)))
        for p in (H, Profile.full(3), profile_generate({(0, 0)}, 3)):
            assert profile_member(U, p)
        assert profile_of(T) == H

    def test_module_property(self, rng):
        n = 5
        for _ in range(20):
            seed = {(int(i), int(j)) for i, j in rng.integers(0, n, (2, 2)) if i >= j}
            p = profile_generate(seed or {(0, 0)}, n)
            v = rng.standard_normal((n, n)) * p.mask()
            u = np.triu(rng.standard_normal((n, n))) + 3 * np.eye(n)
            assert profile_member(commutator(u, v), p)
            assert profile_member(u @ v @ np.linalg.inv(u), p, rtol=1e-10)

    def test_chart_restriction(self, rng):
        for _ in range(10):
            J = random_jacobi(rng, 5)
            p = profile_of(J)
            for pi in (Permutation.identity(5), Permutation(tuple(rng.permutation(5)))):
                Z = chart_decompose(J, pi).Z
                assert profile_member(Z, p, rtol=1e-10)


class TestJacobi:
    def test_detect_examples(self):
        pt = point((7, 5, 4), [[0, 0, 0], [1, 0, 0], [0, 2, 0]])
        assert jacobi_detect(pt)
        J = chart_reconstruct(pt)
        assert np.allclose(J, J.T, atol=1e-13)
        assert np.max(np.abs(np.tril(J, -2))) < 1e-12 and np.all(np.diag(J, -1) > 0)
        assert not jacobi_detect(point((7, 5, 4), np.zeros((3, 3))))
        neg = point((7, 5, 4), [[0, 0, 0], [-1, 0, 0], [0, 2, 0]])
        assert not jacobi_detect(neg)
        assert chart_reconstruct(neg)[1, 0] < 0

    def test_moser_examples(self):
        assert np.allclose(jacobi_from_moser(MoserData(Spectrum((3.5,)), np.array([1.0]))), [[3.5]])
        J = jacobi_from_moser(MoserData(Spectrum((6, 4)), np.array([1, 1]) / np.sqrt(2)))
        assert np.allclose(J, [[5, 1], [1, 5]])

    def test_moser_round_trip(self, rng):
        for n in (3, 4, 6):
            c = rng.uniform(0.1, 1, n)
            data = MoserData(Spectrum((7, 5, 4, 2, 1, 0)[:n]), c / np.linalg.norm(c))
            J = jacobi_from_moser(data)
            assert np.all(np.diag(J, -1) > 0)
            assert np.allclose(np.linalg.eigvalsh(J)[::-1], data.spectrum.values, atol=1e-9)
            back = moser_data(J)
            assert np.allclose(back.c, data.c, atol=1e-9)
            assert jacobi_detect(chart_decompose(J, Permutation.identity(n)))

    def test_moser_validation(self):
        with pytest.raises(ValueError):
            MoserData(Spectrum((2, 1)), np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            MoserData(Spectrum((2, 1)), np.array([0.5, 0.5]))
