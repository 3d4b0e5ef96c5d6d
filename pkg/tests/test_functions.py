import numpy as np
import pytest

from isoflow.errors import NonpositiveSpectrum
from isoflow.functions import ScalarFunction, parse_function
from isoflow.integrate import Trajectory, rk4


def test_matrix_evaluation_examples():
    M = np.array([[5.0, 1.0], [1.0, 5.0]])
    assert np.array_equal(ScalarFunction.identity().of_matrix(M), M)
    assert np.allclose(ScalarFunction.polynomial(0, 0, 1).of_matrix(M), [[26, 10], [10, 26]])
    assert np.allclose(ScalarFunction.log().of_matrix(np.diag([np.e, 1.0])), np.diag([1, 0]),
                       atol=1e-15)
    with pytest.raises(NonpositiveSpectrum):
        ScalarFunction.log().of_matrix(np.diag([1.0, -1.0]))


def test_spectral_matches_series(rng):
    A = rng.standard_normal((3, 3))
    M = A @ A.T + np.diag([3.0, 2.0, 1.0])
    w, V = np.linalg.eigh(M)
    assert np.allclose(ScalarFunction.exp().of_matrix(M), V @ np.diag(np.exp(w)) @ V.T)
    assert np.allclose(ScalarFunction.log().of_matrix(M), V @ np.diag(np.log(w)) @ V.T)


def test_parse_round_trip():
    for text in ("id", "log", "exp", "poly:0,-2,0,1", "(1.5)poly:1,2;(2)poly:0,0,1"):
        f = parse_function(text)
        assert parse_function(str(f)) == f
    assert parse_function("poly:0,-2,0,1")(2.0) == pytest.approx(4.0)
    for bad in ("poly:", "poly:1,,2", "sin", "(0)poly:1", "(1)poly:1;bad"):
        with pytest.raises(ValueError):
            parse_function(bad)


def test_schedule_integral():
    f = ScalarFunction.scheduled([(1.0, (0.0, 1.0)), (2.0, (0.0, 0.0, 1.0))])
    x = np.array([2.0, 3.0])
    assert f(x, 0.5).tolist() == [2, 3]
    assert f(x, 1.5).tolist() == [4, 9]
    assert f(x, 10.0).tolist() == [4, 9]
    assert np.allclose(f.integral(x, 0.5), 0.5 * x)
    assert np.allclose(f.integral(x, 2.0), x + x**2)
    assert np.allclose(f.integral(x, 4.0), x + 3 * x**2)
    assert np.allclose(f.integral(x, -1.0), -x)
    # oracle: midpoint quadrature of p(x; s)
    s = (np.arange(40000) + 0.5) * 4.0 / 40000
    quad = sum(f(x, si) for si in s) * (4.0 / 40000)
    assert np.allclose(f.integral(x, 4.0), quad, rtol=1e-4)


def test_function_validation():
    with pytest.raises(ValueError):
        ScalarFunction("polynomial", ())
    with pytest.raises(ValueError):
        ScalarFunction.scheduled([(-1.0, (1.0,))])
    with pytest.raises(ValueError):
        ScalarFunction("sine")


def test_rk4_order_and_sampling():
    f = lambda s, y: -y  # noqa: E731
    errs = [abs(rk4(f, np.ones((1, 1)), 1.0, h).final[0, 0] - np.exp(-1)) for h in (0.1, 0.05)]
    assert 14 < errs[0] / errs[1] < 18
    tr = rk4(f, np.ones((1, 1)), 1.0, 0.3)
    assert tr.times[-1] == 1.0 and len(tr) == 5
    tr = rk4(f, np.ones((1, 1)), 2.0, 1e-3, samples=5)
    assert np.allclose(tr.times, [0, 0.5, 1, 1.5, 2])
    assert np.allclose(tr.states[:, 0, 0], np.exp(-tr.times), atol=1e-12)
    back = rk4(f, np.ones((1, 1)), -1.0, 1e-3)
    assert back.final[0, 0] == pytest.approx(np.e, rel=1e-12)
    with pytest.raises(ValueError):
        rk4(f, np.ones((1, 1)), 1.0, 0.0)
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 1, 1)))
