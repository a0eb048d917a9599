from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SMOOTH, example1, example2
from spps.errors import OrderMismatch
from spps.grid import Grid, cumulative_array
from spps.powers import build_x, build_xtilde
from spps.problem import Problem
from spps.series import SeriesSolution, assemble, recenter
from spps import spectral


def closed_form(x, lam):
    w = np.sqrt(complex(sum(lam)))
    if abs(w) < 1e-12:
        return np.ones_like(x, dtype=complex), x.astype(complex)
    return np.cos(w * x), np.sin(w * x) / w


def test_constant_coefficient_closed_form(ex1_full):
    x = ex1_full.grid.x
    for lam in [(0.3, 0.2), (-0.5, 0.9j), (1.0, 0.0), (0.5, 0.5)]:
        vals = ex1_full.evaluate(lam)
        c, s = closed_form(x, lam)
        np.testing.assert_allclose(vals["V1"].values, c, atol=1e-10)
        np.testing.assert_allclose(vals["V2"].values, s, atol=1e-10)
    assert abs(ex1_full.evaluate((0.5, 0.5))["V2"].values[-1]) < 1e-9


def test_zero_parameter_recovers_seed():
    prob = SMOOTH["graded"]()
    sset = prob.build_series(normalized=False)
    vals = sset.evaluate((0.0, 0.0))
    np.testing.assert_allclose(vals["U1"].values, prob.seed.u0.values, atol=1e-15)
    np.testing.assert_allclose(vals["U1P"].values, prob.seed.u0_prime.values, atol=1e-15)


def test_all_zero_series():
    g = Grid(0.0, 1.0, 4)
    sol = SeriesSolution("U1", [(0,), (1,)], np.zeros((2, 5), dtype=complex), 1, 1, "full", g)
    assert np.all(sol.evaluate((2.5,)).values == 0)


@pytest.mark.parametrize("name", sorted(SMOOTH))
def test_initial_values(name):
    prob = SMOOTH[name]()
    raw = prob.build_series(normalized=False)
    norm = prob.build_series()
    u0 = prob.seed.u0.at(prob.grid.i0)
    u0p = prob.seed.u0_prime.at(prob.grid.i0)
    p0 = prob.p.at(prob.grid.i0)
    i0 = prob.grid.i0
    rng = np.random.default_rng(7)
    for _ in range(3):
        lam = rng.normal(size=prob.d) + 1j * rng.normal(size=prob.d)
        U, V = raw.evaluate(lam), norm.evaluate(lam)
        np.testing.assert_allclose(
            [U["U1"].at(i0), U["U1P"].at(i0), U["U2"].at(i0), U["U2P"].at(i0)],
            [u0, u0p, 0, 1 / (p0 * u0)], atol=1e-14)
        np.testing.assert_allclose(
            [V["V1"].at(i0), V["V1P"].at(i0), V["V2"].at(i0), V["V2P"].at(i0)], [1, 0, 0, 1], atol=1e-12)


def test_normalization_at_complex_point():
    prob = SMOOTH["graded"]()
    vals = prob.build_series().evaluate((0.3, -0.7j))
    assert abs(vals["V1"].at(0) - 1) <= 1e-12
    assert abs(vals["V1P"].at(0)) <= 1e-12
    assert abs(vals["V2"].at(0)) <= 1e-12
    assert abs(vals["V2P"].at(0) - 1) <= 1e-12


@given(st.lists(st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False), min_size=2, max_size=2))
@settings(max_examples=15, deadline=None)
def test_wronskian_constant(lam):
    sset = _graded_hi()
    vals = sset.evaluate(lam)
    p = sset.p_at
    W = p * (vals["V1"].values * vals["V2P"].values - vals["V1P"].values * vals["V2"].values)
    np.testing.assert_allclose(W, p[0], rtol=1e-8)


_CACHE = {}


def _graded_hi():
    if "g" not in _CACHE:
        _CACHE["g"] = SMOOTH["graded"](N=14, M=400).build_series()
    return _CACHE["g"]


@given(st.lists(st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False), min_size=2, max_size=2))
@settings(max_examples=10, deadline=None)
def test_ode_residual(lam):
    """Integrated form ``p v' - (p v')(x0) + int (q - sum lam r) v = 0``."""
    sset = _graded_hi()
    prob = SMOOTH["graded"](N=14, M=400)
    vals = sset.evaluate(lam)
    w = prob.q.values - sum(l * ri.values for l, ri in zip(lam, prob.r))
    for v, vp in (("V1", "V1P"), ("V2", "V2P")):
        flux = sset.p_at * vals[vp].values
        res = flux - flux[0] + cumulative_array(w * vals[v].values, prob.grid)
        assert np.max(np.abs(res)) < 1e-9


def _classical_single(prob, lam, N):
    """Textbook single-parameter recursion with unrescaled powers."""
    g, seed = prob.grid, prob.build_seed()
    u0 = seed.u0.values
    inv = 1.0 / (prob.p.values * u0 * u0)
    rw = prob.r[0].values * u0 * u0
    Xt, X = [np.ones(g.M + 1, dtype=complex)], [np.ones(g.M + 1, dtype=complex)]
    for n in range(1, 2 * N + 2):
        Xt.append(n * cumulative_array(Xt[-1] * (rw if n % 2 else inv), g))
        X.append(n * cumulative_array(X[-1] * (inv if n % 2 else rw), g))
    u1 = u0 * sum(lam**k * Xt[2 * k] / factorial(2 * k) for k in range(N + 1))
    u2 = u0 * sum(lam**k * X[2 * k + 1] / factorial(2 * k + 1) for k in range(N + 1))
    return u1, u2


def test_single_parameter_reduction():
    prob = Problem.from_expressions(0, 1.5, 300, "1+x^2/4", "sin(x)", ["cos(x)"], N=12)
    sset = prob.build_series(normalized=False)
    for lam in (0.7, -1.3 + 0.4j):
        vals = sset.evaluate((lam,))
        u1, u2 = _classical_single(prob, lam, 12)
        np.testing.assert_allclose(vals["U1"].values, u1, atol=1e-10)
        np.testing.assert_allclose(vals["U2"].values, u2, atol=1e-10)


def test_equal_coefficients_collapse():
    kw = dict(N=12, seed=None)
    two = Problem.from_expressions(0, 1.5, 300, "1+x/2", "sin(x)", ["1+x", "1+x"], **kw).build_series()
    one = Problem.from_expressions(0, 1.5, 300, "1+x/2", "sin(x)", ["1+x"], **kw).build_series()
    for lam in [(0.2, 0.3), (-0.4j, 0.5), (0.6, -0.1 + 0.2j)]:
        a, b = two.evaluate(lam), one.evaluate((sum(lam),))
        for k in ("V1", "V2", "V1P", "V2P"):
            np.testing.assert_allclose(a[k].values, b[k].values, atol=1e-10)


@pytest.mark.parametrize("name", ["constant", "graded"])
def test_cosh_growth_bound(name):
    """``|u1| <= |u0| cosh^d(M sqrt(Lambda) |x - x0|)`` with ``M = max(M0, M_i)``."""
    prob = SMOOTH[name](N=12)
    sset = prob.build_series(normalized=False)
    u0 = prob.seed.u0.values
    M = max([np.max(np.abs(1 / (prob.p.values * u0 * u0)))] +
            [np.max(np.abs(ri.values * u0 * u0)) for ri in prob.r])
    dist = np.abs(prob.grid.x - prob.grid.x0)
    rng = np.random.default_rng(3)
    for _ in range(5):
        lam = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
        u1 = sset.evaluate(lam)["U1"].values
        bound = np.abs(u0) * np.cosh(M * np.sqrt(np.max(np.abs(lam))) * dist) ** prob.d
        assert np.all(np.abs(u1) <= bound * (1 + 1e-9))


def test_order_mismatch():
    prob = SMOOTH["constant"](N=3)
    seed = prob.build_seed()
    xt = build_xtilde(seed, prob.p, prob.r, 3)
    xs = build_x(seed, prob.p, prob.r, 2)
    with pytest.raises(OrderMismatch):
        assemble(xt, xs, seed, prob.p, 3)


def test_tail_diagnostic(ex1_full):
    _, small = ex1_full["V1"].evaluate((0.1, 0.1), with_tail=True)
    _, large = ex1_full["V1"].evaluate((3.0, 3.0), with_tail=True)
    assert 0 <= small < 1e-20 < large


def test_recenter_at_origin_is_identity():
    prob = SMOOTH["graded"]()
    base = prob.build_series()
    again = recenter(SMOOTH["graded"](), (0.0, 0.0))
    for k in ("V1", "V2", "V1P", "V2P"):
        np.testing.assert_allclose(again[k].coeffs, base[k].coeffs, rtol=0, atol=1e-15)


def test_recenter_far_point():
    prob = example1(N=10)
    prob.seed_order = 30
    sset = recenter(prob, (4.0, 4.0))
    vals = sset.evaluate((4.1, 4.1))
    c, s = closed_form(prob.grid.x, (4.1, 4.1))
    np.testing.assert_allclose(vals["V1"].values, c, atol=1e-9)
    np.testing.assert_allclose(vals["V2"].values, s, atol=1e-9)


def test_recenter_at_eigenvalue():
    # the shifted seed is rebuilt on the mesh, so the mesh must resolve it
    base = example2(M=1600)
    chi = spectral.characteristic_polynomial(base.build_series(), base.bc)
    roots = spectral.roots_univariate(spectral.section(chi, {1: 1.0}))
    lam1 = min((r for r in roots if r.trusted), key=lambda r: abs(r.value - 3.9177)).value
    prob = example2(M=1600)
    sset = recenter(prob, (lam1, 1.0))
    chi_c = spectral.characteristic_polynomial(sset, prob.bc)
    assert abs(chi_c((lam1, 1.0))) < 1e-8


def test_dump_csv(tmp_path, ex1_full):
    ex1_full.dump_csv(tmp_path / "s.csv", (0.5, 0.5))
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "x,re(v1),im(v1),re(v2),im(v2),re(v1p),im(v1p),re(v2p),im(v2p)"
    assert len(lines) == ex1_full.grid.M + 2
