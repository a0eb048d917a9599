import numpy as np
import pytest

from conftest import SMOOTH, example1, example2
from spps import spectral
from spps.errors import NoSignChange
from spps.oracle import meissner_curve, rk4_solve


def _sine_error(M):
    prob = example1(M=M)
    y = rk4_solve(prob.p, prob.q, prob.r, None, [0.5, 0.5], 0.0, 1.0)
    return np.max(np.abs(y.y.values - np.sin(prob.grid.x)))


def test_rk4_sine():
    assert _sine_error(800) < 1e-8
    assert 12 <= _sine_error(100) / _sine_error(200) <= 20


def test_rk4_zero_parameter_reproduces_seed():
    prob = SMOOTH["graded"](M=400)
    seed = prob.build_seed()
    y = rk4_solve(prob.p, prob.q, prob.r, None, [0, 0], seed.u0.at(0), seed.u0_prime.at(0))
    np.testing.assert_allclose(y.y.values, seed.u0.values, atol=1e-8)
    np.testing.assert_allclose(y.y_prime.values, seed.u0_prime.values, atol=1e-8)


def test_rk4_interior_basepoint():
    prob = SMOOTH["three"](M=400)
    y = rk4_solve(prob.p, prob.q, prob.r, None, [0, 0, 0], 1.0, 0.0)
    assert y.y.at(prob.grid.i0) == 1
    seed = prob.build_seed()
    # any solution at lam = 0 is a combination of Re u0 and Im u0 (both real solutions)
    A = np.stack([seed.u0.values.real, seed.u0.values.imag], axis=1)
    coef, *_ = np.linalg.lstsq(A, y.y.values.real, rcond=None)
    np.testing.assert_allclose(A @ coef, y.y.values.real, atol=1e-8)


def test_rk4_vector_initial_data():
    prob = example1(M=200)
    y, yp = rk4_solve(prob.p, prob.q, prob.r, None, [0.5, 0.5], [1.0, 0.0], [0.0, 1.0])
    assert y.shape == (2, 201)
    np.testing.assert_allclose(y[0], np.cos(prob.grid.x), atol=1e-7)
    np.testing.assert_allclose(yp[1], np.cos(prob.grid.x), atol=1e-7)


def test_shooting_at_series_root():
    prob = example2(M=400)
    chi = spectral.characteristic_polynomial(prob.build_series(), prob.bc)
    roots = spectral.roots_univariate(spectral.section(chi, {1: 1.0}))
    lam1 = min((r.value for r in roots if r.trusted), key=lambda z: abs(z - 3.9177))
    assert abs(lam1 - 3.9177) < 1e-4
    y = rk4_solve(prob.p, prob.q, prob.r, None, [lam1.real, 1.0], 0.0, 1.0)
    assert abs(y.y.values[-1]) < 1e-5


def test_series_agrees_with_rk4():
    prob = example2(M=800)
    prob.N = 20
    sset = prob.build_series()
    rng = np.random.default_rng(11)
    for _ in range(5):
        lam = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
        vals = sset.evaluate(lam)
        y, yp = rk4_solve(prob.p, prob.q, prob.r, None, lam, [1.0, 0.0], [0.0, 1.0])
        assert np.max(np.abs(vals["V1"].values - y[0])) <= 1e-6
        assert np.max(np.abs(vals["V2"].values - y[1])) <= 1e-6
        assert np.max(np.abs(vals["V2P"].values - yp[1])) <= 1e-6


def test_meissner_curve_points():
    lam1, lam2 = meissner_curve(3 * np.pi / 4)
    assert abs(lam1 - 4.8049) < 1e-4 and abs(lam2 - 4.0721j) < 1e-4
    lam1, lam2 = meissner_curve(np.pi)
    assert abs(lam1 - np.pi**2) < 1e-12 and lam2 == 0
    lam1, lam2 = meissner_curve(np.pi / 2)
    assert abs(lam1 - np.pi**2 / 4) < 1e-12 and abs(lam2) < 1e-6
    with pytest.raises(NoSignChange):
        meissner_curve(np.pi / 4)


@pytest.mark.parametrize("s", [2.5, 3 * np.pi / 4, 2.8])
def test_meissner_curve_satisfies_equation(s):
    lam1, lam2 = meissner_curve(s)
    h = lam2.imag / (2 * s)
    assert abs(s * np.sin(2 * s) + h * np.sinh(2 * h)) < 1e-10
    assert abs(lam1 - (s * s - h * h)) < 1e-12
