import numpy as np
import pytest

from isoflow.charts import chart_decompose
from isoflow.errors import DegenerateSingularValues, NotInSvdChart
from isoflow.extended import qr_step
from isoflow.functions import ScalarFunction
from isoflow.linalg_core import Permutation, Spectrum
from isoflow.sampling import random_svd_point
from isoflow.svd import (
    SvdChartPoint,
    gram_coordinates,
    polar_split,
    svd_chart_decompose,
    svd_chart_reconstruct,
    svd_charts_containing,
    svd_exact,
    svd_first_chart,
    svd_frames,
    svd_lax_integrate,
    svd_rhs,
)

IDF = ScalarFunction.identity()
SQ = ScalarFunction.polynomial(0, 0, 1)
I2 = Permutation.identity(2)


def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_polar_split(rng):
    P, W = polar_split(np.diag([3.0, -2.0]))
    assert np.allclose(P, np.diag([3, 2])) and np.allclose(W, np.diag([1, -1]))
    S = np.array([[2.0, 0.5], [0.5, 1.0]])
    P, W = polar_split(S)
    assert np.allclose(P, S) and np.allclose(W, np.eye(2))
    P, W = polar_split(rot(0.3))
    assert np.allclose(P, np.eye(2)) and np.allclose(W, rot(0.3))
    M = rng.standard_normal((4, 4))
    P, W = polar_split(M)
    assert np.allclose(np.linalg.eigvalsh(P)[::-1], np.linalg.svd(M, compute_uv=False))


class TestDecompose:
    def test_sigma(self):
        pt = svd_chart_decompose(np.diag([2.0, 1.0]), I2, I2, (1, 1))
        assert not np.any(pt.Z_left) and not np.any(pt.Z_right)

    def test_rotated(self):
        pt = svd_chart_decompose(np.diag([2.0, 1.0]) @ rot(0.2), I2, I2, (1, 1))
        assert np.max(np.abs(pt.Z_left)) < 1e-14
        assert abs(pt.Z_right[1, 0]) > 0.1
        back = svd_chart_reconstruct(pt)
        assert np.allclose(back, np.diag([2.0, 1.0]) @ rot(0.2), atol=1e-14)

    def test_sign_absorbed(self):
        M = np.diag([2.0, 1.0]) @ np.diag([1.0, -1.0])
        assert svd_first_chart(M) == (I2, I2, (1, -1))
        pt = svd_chart_decompose(M, I2, I2, (1, -1))
        assert not np.any(pt.Z_left) and not np.any(pt.Z_right)
        with pytest.raises(NotInSvdChart):
            svd_chart_decompose(M, I2, I2, (1, 1))

    def test_errors(self):
        with pytest.raises(DegenerateSingularValues):
            svd_chart_decompose(np.eye(2), I2, I2, (1, 1))
        with pytest.raises(DegenerateSingularValues):
            svd_chart_decompose(np.diag([1.0, 0.0]), I2, I2, (1, 1))
        with pytest.raises(ValueError):
            SvdChartPoint(I2, I2, (1, 2), Spectrum((2, 1)), np.zeros((2, 2)), np.zeros((2, 2)))

    def test_round_trip(self, rng):
        for n in (2, 3, 4, 5):
            for _ in range(10):
                pt = random_svd_point(rng, n)
                M = svd_chart_reconstruct(pt)
                assert np.allclose(np.linalg.svd(M, compute_uv=False), pt.sigma.values, atol=1e-9)
                back = svd_chart_decompose(M, pt.pi, pt.rho, pt.E)
                assert np.allclose(back.Z_left, pt.Z_left, atol=1e-9)
                assert np.allclose(back.Z_right, pt.Z_right, atol=1e-9)

    def test_frames_factor_m(self, rng):
        pt = random_svd_point(rng, 3)
        M, Q, U = svd_frames(pt)
        s = pt.sigma.as_array()
        Spi = Q.T @ np.diag(s[list(pt.pi.images)]) @ Q
        Srho = U.T @ np.diag(s[list(pt.rho.images)]) @ U
        assert np.allclose(Spi @ Spi, M @ M.T) and np.allclose(Srho @ Srho, M.T @ M)


class TestCharts:
    def test_sigma_in_identity_chart(self):
        Sigma = np.diag([3.0, 2.0, 1.0])
        ident = Permutation.identity(3)
        assert (ident, ident, (1, 1, 1)) in svd_charts_containing(Sigma)

    def test_permuted(self):
        tau = Permutation.from_one_based([2, 3, 1])
        M = tau.matrix() @ np.diag([3.0, 2.0, 1.0])
        triple = (tau.inverse(), Permutation.identity(3), (1, 1, 1))
        assert triple in svd_charts_containing(M)
        pt = svd_chart_decompose(M, *triple)
        assert not np.any(pt.Z_left) and not np.any(pt.Z_right)

    def test_generic_nonempty_and_valid(self, rng):
        M = rng.standard_normal((3, 3))
        found = svd_charts_containing(M)
        assert found
        for pi, rho, E in found[:: max(1, len(found) // 6)]:
            pt = svd_chart_decompose(M, pi, rho, E)
            assert np.allclose(svd_chart_reconstruct(pt), M, atol=1e-9)
        assert svd_first_chart(M) == found[0]

    def test_size_limit(self):
        with pytest.raises(ValueError):
            svd_charts_containing(np.diag([5.0, 4, 3, 2, 1]))


class TestRhs:
    def test_equilibria(self):
        assert np.allclose(svd_rhs(np.diag([3.0, 2.0]), SQ, IDF), 0)
        assert np.allclose(svd_rhs(np.diag([3.0, -2.0, 1.0]), IDF, SQ), 0)

    def test_rotated(self):
        M = np.diag([2.0, 1.0]) @ rot(0.3)
        A = np.tril(M.T @ M, -1)
        expected = M @ (A - A.T)
        assert np.allclose(svd_rhs(M, IDF, IDF), expected)
        assert np.max(np.abs(expected)) > 0.1

    def test_constant_at_equilibrium(self):
        tr = svd_lax_integrate(np.diag([2.0, 1.0]), SQ, SQ, 1.0, 1e-2)
        assert np.allclose(tr.states, np.diag([2.0, 1.0]))


class TestExact:
    def test_rate_example(self):
        pt = SvdChartPoint(I2, I2, (1, 1), Spectrum((2, 1)), np.array([[0, 0], [1.0, 0]]),
                           np.array([[0, 0], [0.5, 0]]))
        moved = svd_exact(pt, IDF, IDF, 0.7)
        assert moved.Z_left[1, 0] == pytest.approx(np.exp(-3 * 0.7))
        assert moved.Z_right[1, 0] == pytest.approx(0.5 * np.exp(-3 * 0.7))
        assert svd_exact(pt, IDF, IDF, 0.0).Z_left[1, 0] == 1.0

    def test_gram_consistency(self, rng):
        for _ in range(10):
            pt = random_svd_point(rng, 4)
            M = svd_chart_reconstruct(pt)
            Zl, Zr = gram_coordinates(pt)
            assert np.allclose(chart_decompose(M @ M.T, pt.pi).Z, Zl, atol=1e-9)
            assert np.allclose(chart_decompose(M.T @ M, pt.rho).Z, Zr, atol=1e-9)

    def test_gram_coordinates_follow_toda(self, rng):
        pt = random_svd_point(rng, 3)
        moved = svd_exact(pt, SQ, IDF, 0.5)
        Zl0, Zr0 = gram_coordinates(pt)
        Zl, Zr = gram_coordinates(moved)
        s2 = pt.sigma.as_array() ** 2
        for Z0, Z, perm, f in ((Zl0, Zl, pt.pi, IDF), (Zr0, Zr, pt.rho, SQ)):
            v = f(s2[list(perm.images)])
            assert np.allclose(Z, np.tril(Z0 * np.exp(0.5 * (v[:, None] - v[None, :])), -1))

    def test_against_oracle(self, rng):
        for p, q in ((IDF, IDF), (SQ, IDF), (IDF, SQ), (SQ, SQ)):
            pt = random_svd_point(rng, 3)
            M0 = svd_chart_reconstruct(pt)
            tr = svd_lax_integrate(M0, p, q, 1.0, 1e-3, samples=3)
            exact = svd_chart_reconstruct(svd_exact(pt, p, q, 1.0))
            assert np.max(np.abs(tr.final - exact)) <= 1e-6
            for S in tr.states:
                assert np.allclose(np.linalg.svd(S, compute_uv=False), pt.sigma.values, atol=1e-7)

    def test_limit(self, rng):
        n = 3
        ident = Permutation.identity(n)
        pt = random_svd_point(rng, n).replace(pi=ident, rho=ident,
                                              sigma=Spectrum((3.0, 2.0, 1.0)))
        M = svd_chart_reconstruct(svd_exact(pt, IDF, IDF, 30.0))
        assert np.max(np.abs(M - np.diag(np.array([3.0, 2.0, 1.0]) * pt.E))) <= 1e-5

    def test_log_time_one_is_qr_step_on_gram(self, rng):
        log = ScalarFunction.log()
        for _ in range(5):
            pt = random_svd_point(rng, 3)
            M0 = svd_chart_reconstruct(pt)
            M1 = svd_chart_reconstruct(svd_exact(pt, log, log, 1.0))
            assert np.allclose(M1 @ M1.T, qr_step(M0 @ M0.T), atol=1e-8)
            assert np.allclose(M1.T @ M1, qr_step(M0.T @ M0), atol=1e-8)
