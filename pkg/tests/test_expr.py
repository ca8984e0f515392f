import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from haargroups import expr as ex
from haargroups.measure import catalogued_bijections


def test_root_of_velocity_forward_is_division():
    e = ex.parse("c*(exp(x)-1)/(1+exp(x))")
    assert isinstance(e.root, ex.BinOp) and e.root.op == "/"


def test_bare_variable():
    assert ex.parse("x").root == ex.Var()


def test_root_of_velocity_inverse_is_ln():
    e = ex.parse("ln((c+x)/(c-x))")
    assert isinstance(e.root, ex.Call) and e.root.func == "ln"


@pytest.mark.parametrize("text, x, params, expected", [
    ("c*(exp(x)-1)/(1+exp(x))", 0.0, {"c": 1.0}, 0.0),
    ("ln((c+x)/(c-x))", 0.5, {"c": 1.0}, math.log(3.0)),
    ("2^3^2", 0.0, {}, 512.0),
    ("-x^2", 3.0, {}, -9.0),
    ("(-x)^2", 3.0, {}, 9.0),
    ("2*pi - e", 0.0, {}, 2 * math.pi - math.e),
    ("sqrt(abs(x)) + sin(0) + cos(0) + atan(1)*4 - tan(0)", -4.0, {}, 3.0 + math.pi),
    ("1.5e2 + .5", 0.0, {}, 150.5),
])
def test_evaluate_golden(text, x, params, expected):
    assert ex.evaluate(ex.parse(text, set(params) | {"c"}), x, params) == pytest.approx(expected, rel=1e-15, abs=1e-15)


@pytest.mark.parametrize("text, x", [("1/x", 0.0), ("ln(x)", -1.0), ("ln(x)", 0.0), ("sqrt(x)", -1.0),
                                     ("exp(x)", 1000.0)])
def test_domain_errors(text, x):
    with pytest.raises(ex.DomainError):
        ex.evaluate(ex.parse(text), x)


def test_unbound_parameter():
    with pytest.raises(ex.UnboundParameterError):
        ex.evaluate(ex.parse("c*x"), 1.0)


@pytest.mark.parametrize("text, exc", [
    ("", ex.ExprSyntaxError),
    ("x +", ex.ExprSyntaxError),
    ("(x", ex.ExprSyntaxError),
    ("x $ 2", ex.ExprSyntaxError),
    ("foo(x)", ex.UnknownFunctionError),
    ("y + 1", ex.UnknownIdentifierError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        ex.parse(text)


def test_syntax_error_reports_position():
    with pytest.raises(ex.ExprSyntaxError) as info:
        ex.parse("x + * 2")
    assert info.value.position == 4


def test_custom_parameter_names():
    e = ex.parse("a*x + b", {"a", "b"})
    assert e.param_names == {"a", "b"}
    assert ex.evaluate(e, 2.0, {"a": 3.0, "b": 1.0}) == 7.0


@pytest.mark.parametrize("text, x, expected", [
    ("ln((1+x)/(1-x))", 0.0, 2.0),
    ("x", 0.3, 1.0),
    ("exp(x)", 1.0, math.e),
])
def test_derivative_golden(text, x, expected):
    assert ex.derivative_at(ex.parse(text), x) == pytest.approx(expected, rel=1e-15)


def test_derivative_at_kink_is_domain_error():
    with pytest.raises(ex.DomainError):
        ex.derivative_at(ex.parse("abs(x)"), 0.0)


SMOOTH = ["exp(x)*sin(x)", "ln(1+x^2)", "atan(x)/(1+x^2)", "sqrt(1+x^2)*cos(x)", "tan(x/3)", "x^3-2*x", "2^x"]


@pytest.mark.parametrize("text", SMOOTH)
def test_derivative_matches_symbolic(text):
    sx = sympy.Symbol("x")
    sym = sympy.sympify(text.replace("^", "**").replace("ln", "log"), locals={"x": sx})
    d = sympy.lambdify(sx, sympy.diff(sym, sx), "math")
    e = ex.parse(text)
    for x in np.linspace(-1.3, 1.7, 13):
        assert ex.derivative_at(e, float(x)) == pytest.approx(d(float(x)), rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("text", SMOOTH)
def test_derivative_matches_central_differences(text):
    e = ex.parse(text)
    h = 1e-6
    for x in np.linspace(-1.3, 1.7, 13):
        fd = (ex.evaluate(e, x + h) - ex.evaluate(e, x - h)) / (2 * h)
        assert ex.derivative_at(e, float(x)) == pytest.approx(fd, rel=1e-5, abs=1e-7)


def test_array_and_scalar_paths_agree():
    e = ex.parse("c*(exp(x)-1)/(1+exp(x))")
    xs = np.linspace(-5, 5, 41)
    arr = ex.compile_array(e, {"c": 2.0})(xs)
    scal = [ex.evaluate(e, float(x), {"c": 2.0}) for x in xs]
    np.testing.assert_allclose(arr, scal, rtol=1e-15, atol=0)


@pytest.mark.parametrize("f", catalogued_bijections(), ids=lambda f: f.label)
def test_catalogued_round_trip(f):
    assert f.check(n=1000, seed=1) <= 1e-10


# random expression trees for the round-trip property
_leaves = st.one_of(
    st.just("x"), st.just("c"), st.just("pi"),
    st.floats(0, 1e6, allow_nan=False).map(repr),
)


def _combine(children):
    binary = st.tuples(children, st.sampled_from("+-*/^"), children).map(lambda t: f"({t[0]}){t[1]}({t[2]})")
    unary = children.map(lambda c: f"-({c})")
    call = st.tuples(st.sampled_from(ex.FUNCTIONS), children).map(lambda t: f"{t[0]}({t[1]})")
    return st.one_of(binary, unary, call)


expressions = st.recursive(_leaves, _combine, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_print_parse_round_trip(text):
    e = ex.parse(text)
    assert ex.parse(ex.to_string(e)) == e


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["x", "2", "c"]), min_size=2, max_size=5), st.sampled_from("^-"))
def test_operator_chains_round_trip(atoms, op):
    text = op.join(atoms)
    e = ex.parse(text)
    assert ex.parse(ex.to_string(e)) == e
