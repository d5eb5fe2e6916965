import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plap import EvalError, ParseError, eval_expr, format_expr, parse_expr


def ev(src, x=0.0, y=None):
    return eval_expr(parse_expr(src), x, y)


def test_precedence_basics():
    assert ev("1 + 2*3") == 7.0
    assert ev("2*3 + 1") == 7.0
    assert ev("6 / 2 / 3") == 1.0
    assert ev("2 - 3 - 4") == -5.0


def test_power_right_associative():
    assert ev("2^3^2") == 512.0


def test_unary_minus_below_power():
    assert ev("-2^2") == -4.0
    assert ev("(-2)^2") == 4.0
    assert ev("2^-1") == 0.5


def test_bump_outside_support():
    assert ev("bump(0.5, 0.1)", x=0.7) == 0.0


def test_bump_center_value():
    assert ev("bump(0.5, 0.1)", x=0.5) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_bump_smooth_profile():
    # t = 0.5 inside the support
    expected = math.exp(-1.0 / (1.0 - 0.25))
    assert ev("bump(0.2, 0.2)", x=0.3) == pytest.approx(expected, rel=1e-14)


def test_sin_at_half():
    assert ev("sin(3.141592653589793*x)", x=0.5) == pytest.approx(1.0, abs=1e-12)


def test_functions():
    assert ev("max(1, 2) + min(3, -1)") == 1.0
    assert ev("abs(-3) + step(0) + step(-0.1)") == 4.0
    assert ev("exp(0) + cos(0)") == 2.0


def test_variables():
    assert ev("x + 1", x=2.0) == 3.0
    assert ev("x*y", x=2.0, y=3.0) == 6.0
    with pytest.raises(EvalError):
        ev("y", x=0.0)  # 1D evaluation


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse_expr("1 + $")
    assert info.value.position == 4
    with pytest.raises(ParseError):
        parse_expr("sin(1, 2)")
    with pytest.raises(ParseError) as info:
        parse_expr("foo(1)")
    assert "foo" in str(info.value)
    with pytest.raises(ParseError):
        parse_expr("1 +")
    with pytest.raises(ParseError):
        parse_expr("")
    with pytest.raises(ParseError):
        parse_expr("(1 + 2")
    with pytest.raises(ParseError):
        parse_expr("unknownvar")


def test_eval_errors():
    with pytest.raises(EvalError):
        ev("1/0")
    with pytest.raises(EvalError):
        ev("0^-1")
    with pytest.raises(EvalError):
        ev("(-2)^0.5")
    with pytest.raises(EvalError):
        ev("bump(0.5, -0.1)")


_leaf = st.one_of(
    st.floats(min_value=0.1, max_value=5.0).map(lambda v: f"{v!r}"),
    st.just("x"),
)


def _exprs(depth):
    if depth == 0:
        return _leaf
    sub = _exprs(depth - 1)
    return st.one_of(
        _leaf,
        st.tuples(sub, st.sampled_from("+-*"), sub).map(lambda t: f"{t[0]} {t[1]} {t[2]}"),
        st.tuples(st.sampled_from(["sin", "cos", "abs"]), sub).map(lambda t: f"{t[0]}({t[1]})"),
        sub.map(lambda s: f"-({s})"),
        st.tuples(sub, sub).map(lambda t: f"min({t[0]}, {t[1]})"),
    )


@settings(max_examples=60, deadline=None)
@given(src=_exprs(3), xs=st.lists(st.floats(min_value=-3, max_value=3), min_size=5, max_size=5))
def test_format_parse_round_trip(src, xs):
    ast = parse_expr(src)
    again = parse_expr(format_expr(ast))
    for x in xs:
        assert eval_expr(again, x) == pytest.approx(eval_expr(ast, x), rel=1e-15, abs=1e-15)


def test_round_trip_fixed_grid():
    srcs = ["1 + 2*x - x^2", "bump(0.5, 0.25) * sin(3*x)", "max(x, 1 - x) / (2 + cos(x))"]
    xs = [k / 99.0 for k in range(100)]
    for src in srcs:
        ast = parse_expr(src)
        again = parse_expr(format_expr(ast))
        for x in xs:
            assert eval_expr(again, x) == pytest.approx(eval_expr(ast, x), rel=1e-15, abs=1e-15)
