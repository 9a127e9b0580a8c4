import pytest
from hypothesis import given, strategies as st

from helpers import envs, exprs

from examforge.exprlang import (
    PARAMS, BinOp, ExprOverflow, ExprSyntaxError, Lit, Neg, Param, ParameterInExponent, Pow,
    UnboundParameter, UnknownParameter, eval_expr, free_params, parse_expr, parse_template,
    render_prompt, serialise, substitute, to_spreadsheet,
)

ENV = {"a1": 2, "a2": 0, "a3": 2, "a4": 0, "b1": 1, "b2": 5, "b3": 3, "g1": 4, "g2": 6, "g3": 7}


def test_precedence_unary_minus_looser_than_power():
    assert parse_expr("-a3^2") == Neg(Pow(Param("a3"), 2))
    assert eval_expr(parse_expr("-a3^2"), ENV) == -4
    assert eval_expr(parse_expr("(-a3)^2"), ENV) == 4


def test_left_associative_subtraction():
    assert eval_expr(parse_expr("10 - 3 - 2"), {}) == 5
    assert eval_expr(parse_expr("10 - (3 - 2)"), {}) == 9


def test_question1_answer_at_worked_point():
    e = parse_expr("-2*a3^4 + a3^2*g3^2 + 8*a3^3 - 9*a3^2")
    assert eval_expr(e, {"a3": 2, "g3": 7}) == 192
    assert free_params(e) == {"a3", "g3"}


@pytest.mark.parametrize("src, exc", [
    ("a5 + 1", UnknownParameter),
    ("g1^g2", ParameterInExponent),
    ("g1^2^2", ExprSyntaxError),
    ("g1 / 2", ExprSyntaxError),
    ("(g1 + 2", ExprSyntaxError),
    ("", ExprSyntaxError),
    ("g1^13", ExprSyntaxError),
])
def test_rejects(src, exc):
    with pytest.raises(exc):
        parse_expr(src)


def test_error_reports_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("g1 + a9")
    assert info.value.pos == 5


def test_unbound_and_overflow():
    with pytest.raises(UnboundParameter):
        eval_expr(parse_expr("g1 + 1"), {})
    with pytest.raises(ExprOverflow):
        eval_expr(parse_expr("(g1*1000000)^12"), {"g1": 9})


def test_spreadsheet_negated_power_is_parenthesised():
    refs = {"a3": "O16"}
    assert to_spreadsheet(parse_expr("-a3^2"), refs) == "-(O16^2)"
    assert to_spreadsheet(parse_expr("(-a3)^2"), refs) == "(-O16)^2"


def test_templates():
    t = parse_template("from {g3} to {g3+1} {{literal}}")
    assert [serialise(s) for s in t.slots] == ["g3", "g3 + 1"]
    assert render_prompt(t, ENV) == "from 7 to 8 {literal}"
    with pytest.raises(ExprSyntaxError) as info:
        parse_template("x {g3 + } y")
    assert info.value.pos > 2


# -- properties ---------------------------------------------------------------

@given(exprs())
def test_round_trip(e):
    text = serialise(e)
    assert serialise(parse_expr(text)) == text
    assert parse_expr(text) == e


@given(exprs(), envs)
def test_round_trip_preserves_value(e, env):
    try:
        v = eval_expr(e, env)
    except ExprOverflow:
        return
    assert eval_expr(parse_expr(serialise(e)), env) == v


@given(exprs(), exprs(), envs)
def test_evaluation_is_a_homomorphism(a, b, env):
    try:
        va, vb = eval_expr(a, env), eval_expr(b, env)
        assert eval_expr(BinOp("+", a, b), env) == va + vb
        assert eval_expr(BinOp("*", a, b), env) == va * vb
        assert eval_expr(Neg(a), env) == -va
    except ExprOverflow:
        pass


@given(exprs(), envs, st.sampled_from(PARAMS), st.integers(0, 9))
def test_substitution_matches_environment_update(e, env, p, k):
    try:
        expected = eval_expr(e, {**env, p: k})
    except ExprOverflow:
        return
    assert eval_expr(substitute(e, {p: Lit(k)}), env) == expected


@given(exprs())
def test_free_params_subset(e):
    assert free_params(e) <= set(PARAMS)
