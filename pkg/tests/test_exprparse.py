import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spps import exprparse as ep
from spps.errors import EvalError, ExprSyntaxError
from spps.grid import Grid


def test_cos_of_square():
    assert ep.parse("cos(x^2)") == ep.Call("cos", ep.BinOp("^", ep.Var(), ep.Num(2.0)))


def test_hyperbolic_profile():
    g = Grid(0.0, 1.0, 10)
    vals = ep.sample(ep.parse("1.4*exp((x/1)*log(2.1/1.4))"), g).values
    np.testing.assert_allclose(vals, 1.4 * np.exp(g.x * np.log(1.5)), rtol=1e-15)


def test_unary_plus_rejected():
    with pytest.raises(ExprSyntaxError) as exc:
        ep.parse("2*+3")
    assert exc.value.offset == 2


@pytest.mark.parametrize("src,offset", [("", 0), ("(x", 2), ("x $ 2", 2), ("foo(x)", 0), ("x 2", 2)])
def test_syntax_error_offsets(src, offset):
    with pytest.raises(ExprSyntaxError) as exc:
        ep.parse(src)
    assert exc.value.offset == offset
    assert exc.value.expected


def test_precedence():
    f = lambda s: ep.evaluate(ep.parse(s), np.array([0.0]))[0]
    assert f("2^3^2") == 512
    assert f("-2^2") == -4
    assert f("2*3+4") == 10
    assert f("2-3-4") == -5
    assert f("8/2/2") == 2
    assert f("2^-1") == 0.5
    assert f("3i*2i") == -6


def test_sgn_on_symmetric_mesh():
    g = Grid(-1.0, 1.0, 10)
    v = ep.sample(ep.parse("sgn(x)"), g).values.real
    assert v[5] == 0 and np.all(v[:5] == -1) and np.all(v[6:] == 1)


def test_pi_and_x():
    g = Grid(0.0, 3.0, 7)
    assert ep.sample(ep.parse("pi"), g).values[3] == np.pi
    np.testing.assert_array_equal(ep.sample(ep.parse("x"), g).values, g.x)


def test_eval_errors():
    with pytest.raises(EvalError) as exc:
        ep.sample(ep.parse("1/x"), Grid(0.0, 1.0, 4))
    assert exc.value.x == 0.0
    with pytest.raises(EvalError):
        ep.sample(ep.parse("log(x-1)"), Grid(0.0, 1.0, 4))


def test_constant_value():
    assert ep.constant_value("-2*pi") == -2 * np.pi
    assert ep.constant_value("1-2i") == 1 - 2j


# random expression generator for the print/parse round trip
_leaf = st.one_of(
    st.just(ep.Var()),
    st.just(ep.Pi()),
    st.floats(0, 100, allow_nan=False).map(lambda v: ep.Num(complex(v))),
    st.floats(0.5, 9).map(lambda v: ep.Num(complex(0, v))),
)


def _extend(children):
    return st.one_of(
        st.builds(ep.Neg, children),
        st.builds(ep.BinOp, st.sampled_from("+-*/^"), children, children),
        st.builds(ep.Call, st.sampled_from(ep.FUNCTIONS), children),
    )


_exprs = st.recursive(_leaf, _extend, max_leaves=12)


@settings(max_examples=50, deadline=None)
@given(_exprs)
def test_print_parse_idempotent(e):
    once = ep.parse(ep.to_source(e))
    assert ep.parse(ep.to_source(once)) == once
    assert ep.to_source(once) == ep.to_source(ep.parse(ep.to_source(once)))
