import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from biwarp.errors import DomainError, ExprSyntaxError, UnknownFunction, UnknownIdentifier
from biwarp.expr import (
    BinOp,
    Call,
    Neg,
    Num,
    Param,
    check_identifiers,
    evaluate,
    free_params,
    parse_expression,
    to_text,
)


@pytest.mark.parametrize(
    "text, env, expected",
    [
        ("1 + 2 * 3", {}, 7.0),
        ("(1 + 2) * 3", {}, 9.0),
        ("-u^2", {"u": 3.0}, -9.0),
        ("2^3^2", {}, 512.0),
        ("8 / 4 / 2", {}, 1.0),
        ("10 - 4 - 3", {}, 3.0),
        ("-(-u)", {"u": 2.0}, 2.0),
        ("u^-2", {"u": 2.0}, 0.25),
        ("sqrt(u^2 + v^2)", {"u": 3.0, "v": 4.0}, 5.0),
        ("cos(pi)", {}, -1.0),
        ("1.5e2 + .5", {}, 150.5),
        ("log(exp(u))", {"u": 0.7}, 0.7),
    ],
)
def test_evaluate(text, env, expected):
    assert evaluate(parse_expression(text), env) == pytest.approx(expected, rel=1e-15)


def test_precedence_tree():
    assert parse_expression("-u^2") == Neg(BinOp("^", Param("u"), Num(2.0)))
    assert parse_expression("a - b - c") == BinOp("-", BinOp("-", Param("a"), Param("b")), Param("c"))
    assert parse_expression("2^3^2") == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))


@pytest.mark.parametrize(
    "text, offset",
    [("u + ", 4), ("u $ v", 2), ("(u + v", 6), ("u v", 2), ("é + u", 0), ("", 0)],
)
def test_syntax_error_offsets(text, offset):
    with pytest.raises(ExprSyntaxError) as err:
        parse_expression(text)
    assert err.value.offset == offset


def test_non_constant_exponent():
    with pytest.raises(ExprSyntaxError):
        parse_expression("u^v")


def test_unknown_function():
    with pytest.raises(UnknownFunction):
        parse_expression("sinh(u)")


def test_identifiers():
    node = parse_expression("u*cos(z) + pi")
    assert free_params(node) == {"u", "z"}
    check_identifiers(node, ["u", "z"])
    with pytest.raises(UnknownIdentifier):
        check_identifiers(node, ["u"])
    with pytest.raises(UnknownIdentifier):
        evaluate(node, {"u": 1.0})


@pytest.mark.parametrize("text", ["log(0)", "sqrt(-1)", "1/0"])
def test_domain_errors(text):
    with pytest.raises(DomainError):
        evaluate(parse_expression(text))


NAMES = st.sampled_from(["u", "v", "x", "z", "w"])
LEAVES = st.one_of(
    NAMES.map(Param),
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        # exponents are constants in the grammar
        st.tuples(children, st.floats(0, 8)).map(lambda t: BinOp("^", t[0], Num(t[1]))),
        st.tuples(st.sampled_from(["sin", "cos", "tan", "exp", "log", "sqrt"]), children).map(lambda t: Call(*t)),
    )


TREES = st.recursive(LEAVES, _extend, max_leaves=12)


@given(TREES)
def test_round_trip(tree):
    text = to_text(tree)
    assert parse_expression(text) == tree
    assert to_text(parse_expression(text)) == text


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_round_trip_preserves_value(a, b):
    tree = parse_expression("u*v - u/(1 + v^2) + sin(u)")
    env = {"u": a, "v": b}
    assert evaluate(parse_expression(to_text(tree)), env) == evaluate(tree, env)
    assert math.isfinite(evaluate(tree, env))
