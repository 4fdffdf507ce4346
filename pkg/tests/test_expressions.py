import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surf4d.errors import EvalError, ExprSyntaxError, UnknownIdentifier
from surf4d.expressions import (
    BinOp,
    Call,
    Num,
    Var,
    compile_chart,
    compile_scalar,
    differentiate,
    evaluate,
    parse,
    to_text,
    variables,
)


def ev(text, u=0.0, v=0.0):
    return evaluate(parse(text), u, v)


def test_numbers_and_precedence():
    assert ev("2") == 2.0
    assert ev("1 + 2*3") == 7.0
    assert ev("(1 + 2)*3") == 9.0
    assert ev("2^3^2") == 512.0  # right associative
    assert ev("-2^2") == -4.0  # unary minus binds looser than the power
    assert ev("6/3/2") == 1.0  # division is left associative
    assert ev("2 - 3 - 4") == -5.0


def test_variables_and_constants():
    assert ev("u + 2*v", 1.0, 3.0) == 7.0
    assert ev("pi") == pytest.approx(math.pi)
    assert ev("e") == pytest.approx(math.e)
    assert variables(parse("u*sin(v) + pi")) == {"u", "v"}
    assert variables(parse("3 + pi")) == set()


def test_functions():
    assert ev("sin(0)") == 0.0
    assert ev("cos(0)") == 1.0
    assert ev("sqrt(2)") == pytest.approx(math.sqrt(2))
    assert ev("log(e)") == pytest.approx(1.0)
    assert ev("abs(-3)") == 3.0
    assert ev("tanh(0.5)") == pytest.approx(math.tanh(0.5))


def test_syntax_errors_carry_offsets():
    with pytest.raises(ExprSyntaxError) as ei:
        parse("1 + * 2")
    assert ei.value.offset == 4
    with pytest.raises(ExprSyntaxError):
        parse("sin(1")
    with pytest.raises(ExprSyntaxError):
        parse("")
    with pytest.raises(ExprSyntaxError):
        parse("1 2")
    with pytest.raises(UnknownIdentifier):
        parse("w + 1")
    with pytest.raises(UnknownIdentifier):
        parse("foo(1)")


def test_eval_errors():
    with pytest.raises(EvalError):
        ev("1/0")
    with pytest.raises(EvalError):
        ev("log(0 - 1)")
    with pytest.raises(EvalError):
        ev("sqrt(0 - 1)")


DIFF_CASES = [
    "u*u + 3*u*v",
    "sin(u)*cos(v)",
    "exp(u - v*v)",
    "sqrt(1 + u*u + v*v)",
    "log(2 + sin(u))",
    "u^3 - v^4 + u^v",
    "tan(u/2) + sinh(v)*cosh(u)",
    "1/(1 + u*u)",
    "abs(u*u*u)",
    "tanh(u*v)",
]


@pytest.mark.parametrize("text", DIFF_CASES)
def test_derivative_matches_finite_difference(text):
    tree = parse(text)
    du = differentiate(tree, "u")
    h = 1e-6
    for u, v in [(0.3, 0.7), (1.1, 0.4), (0.9, 1.3)]:
        numeric = (evaluate(tree, u + h, v) - evaluate(tree, u - h, v)) / (2 * h)
        assert evaluate(du, u, v) == pytest.approx(numeric, rel=1e-6, abs=1e-7)


def test_derivative_of_constants_and_vars():
    assert differentiate(parse("pi"), "u") == Num(0.0)
    assert differentiate(parse("v"), "u") == Num(0.0)
    assert differentiate(parse("u"), "u") == Num(1.0)


def test_power_rule_with_constant_exponent():
    du = differentiate(parse("u^3"), "u")
    assert evaluate(du, 2.0, 0.0) == pytest.approx(12.0)


def test_general_power_rule():
    du = differentiate(parse("u^v"), "u")
    # d/du u^v = v*u^(v-1)
    assert evaluate(du, 2.0, 3.0) == pytest.approx(12.0)
    dv = differentiate(parse("u^v"), "v")
    # d/dv u^v = u^v * log(u)
    assert evaluate(dv, 2.0, 3.0) == pytest.approx(8.0 * math.log(2.0))


def test_abs_derivative_uses_sign():
    du = differentiate(parse("abs(u)"), "u")
    assert evaluate(du, 2.5, 0.0) == 1.0
    assert evaluate(du, -2.5, 0.0) == -1.0


# strategy for expression trees built from the public constructors; every
# generated tree is printable by to_text and parseable back
_leaf = st.one_of(
    st.builds(Num, st.floats(min_value=0.0, max_value=4.0, allow_nan=False)),
    st.just(Var("u")),
    st.just(Var("v")),
)

_fn = st.sampled_from(["sin", "cos", "exp", "tanh", "abs"])


def _branch(children):
    return st.one_of(
        st.builds(lambda a, b: BinOp("+", a, b), children, children),
        st.builds(lambda a, b: BinOp("-", a, b), children, children),
        st.builds(lambda a, b: BinOp("*", a, b), children, children),
        st.builds(lambda f, a: Call(f, a), _fn, children),
    )


_trees = st.recursive(_leaf, _branch, max_leaves=12)


def _value_or_error(fn, *args):
    try:
        return fn(*args)
    except (EvalError, OverflowError, ValueError, ZeroDivisionError):
        return "error"


@given(_trees, st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=150, deadline=None)
def test_text_round_trip_preserves_value(tree, u, v):
    text = to_text(tree)
    back = parse(text)
    assert _value_or_error(evaluate, back, u, v) == \
        _value_or_error(evaluate, tree, u, v)


@given(_trees, st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_compiled_function_matches_interpreter(tree, u, v):
    fn = compile_scalar(tree)
    got = _value_or_error(fn, u, v)
    want = _value_or_error(evaluate, tree, u, v)
    if want == "error":
        assert got == "error" or not math.isfinite(got)
    else:
        assert got == pytest.approx(want, rel=1e-15, abs=0.0)


@given(_trees)
@settings(max_examples=100, deadline=None)
def test_round_trip_is_stable(tree):
    text = to_text(tree)
    again = to_text(parse(text))
    assert parse(again) == parse(text)


def test_compile_chart_exact_jets():
    from surf4d.charts import eval_jet2

    chart = compile_chart("u*v", "u + v", "sin(u)", "v*v", ((-1, 1), (-1, 1)),
                          name="t")
    assert chart.is_exact
    jet = eval_jet2(chart, 0.5, -0.25)
    assert jet.p[0] == pytest.approx(-0.125)
    assert jet.zu[0] == pytest.approx(-0.25)  # d(uv)/du = v
    assert jet.zv[0] == pytest.approx(0.5)
    assert jet.zuv[0] == pytest.approx(1.0)
    assert jet.zuu[2] == pytest.approx(-math.sin(0.5))
    assert jet.zvv[3] == pytest.approx(2.0)


def test_compile_chart_rejects_unknown_names():
    with pytest.raises(UnknownIdentifier):
        compile_chart("u", "v", "w", "0", ((-1, 1), (-1, 1)), name="t")
