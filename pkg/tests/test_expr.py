from __future__ import annotations

import pytest

from beliefcast.errors import DivisionByZero, ExpressionSyntaxError, UnboundIdentifier
from beliefcast.expr import (
    Bin,
    Call,
    Ident,
    Num,
    Unary,
    eval_expression,
    parse_expression,
    print_expression,
)


class TestParse:
    def test_multiplication_binds_tighter_than_addition(self):
        e = parse_expression("a + b * 2")
        assert e == Bin("+", Ident("a"), Bin("*", Ident("b"), Num(2.0)))

    def test_conditional_with_comparison(self):
        e = parse_expression("if(level < 15, fs, 0)")
        assert e == Call("if", (Bin("<", Ident("level"), Num(15.0)),
                                Ident("fs"), Num(0.0)))

    def test_max_call(self):
        assert parse_expression("max(wti, 18)") == Call("max", (Ident("wti"), Num(18.0)))

    def test_dotted_identifiers(self):
        assert parse_expression("WTI.1 + OPEC.a") == \
            Bin("+", Ident("WTI.1"), Ident("OPEC.a"))

    def test_parentheses_and_unary_minus(self):
        e = parse_expression("-(a + b) / 2")
        assert e == Bin("/", Unary("-", Bin("+", Ident("a"), Ident("b"))), Num(2.0))

    def test_logical_operators(self):
        e = parse_expression("not a and b or c")
        assert e == Bin("or", Bin("and", Unary("not", Ident("a")), Ident("b")), Ident("c"))

    def test_scientific_notation(self):
        assert parse_expression("1.5e-3") == Num(0.0015)

    @pytest.mark.parametrize("bad", ["", "   ", "a +", "(a", "min(a)", "if(a, b)",
                                     "a ? b", "1 2", "a < b < c and", "abs(a, b)"])
    def test_syntax_errors(self, bad):
        with pytest.raises(ExpressionSyntaxError):
            parse_expression(bad)

    def test_syntax_error_carries_position(self):
        with pytest.raises(ExpressionSyntaxError) as e:
            parse_expression("a + $")
        assert e.value.position == 4

    def test_depth_limit(self):
        deep = "(" * 70 + "x" + ")" * 70
        with pytest.raises(ExpressionSyntaxError):
            parse_expression("-" * 70 + "x")
        assert parse_expression(deep) == Ident("x")  # parens add no tree depth


class TestPrint:
    @pytest.mark.parametrize("text", [
        "a + b * 2",
        "if(level < 15, fs, 0)",
        "max(wti, 18)",
        "(a + b) * (c - d)",
        "-x / (y - 2)",
        "not (a and b) or c >= 1",
        "a - b - c",
        "a / b / c",
        "if(OIFee = 1, max(WTI.1, 18), WTI.1)",
    ])
    def test_round_trip(self, text):
        e = parse_expression(text)
        assert parse_expression(print_expression(e)) == e

    def test_left_associativity_preserved(self):
        e = parse_expression("a - (b - c)")
        assert parse_expression(print_expression(e)) == e
        assert e != parse_expression("a - b - c")


class TestEval:
    def test_addition(self):
        assert eval_expression(parse_expression("a+b"), {"a": 1.0, "b": 2.0}) == 3.0

    def test_if_false_branch(self):
        assert eval_expression(parse_expression("if(1<0, 5, 7)"), {}) == 7.0

    def test_min_clamps(self):
        assert eval_expression(parse_expression("min(x, 18)"), {"x": 20.0}) == 18.0

    def test_comparisons_yield_unit_floats(self):
        env = {"a": 2.0, "b": 2.0}
        assert eval_expression(parse_expression("a = b"), env) == 1.0
        assert eval_expression(parse_expression("a < b"), env) == 0.0
        assert eval_expression(parse_expression("a <= b"), env) == 1.0
        assert eval_expression(parse_expression("a >= b"), env) == 1.0
        assert eval_expression(parse_expression("a > b"), env) == 0.0

    def test_logic_truthiness(self):
        assert eval_expression(parse_expression("2 and -1"), {}) == 1.0
        assert eval_expression(parse_expression("0 or 0"), {}) == 0.0
        assert eval_expression(parse_expression("not 0"), {}) == 1.0

    def test_abs_and_unary(self):
        assert eval_expression(parse_expression("abs(-3) - -2"), {}) == 5.0

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            eval_expression(parse_expression("1 / x"), {"x": 0.0})

    def test_division_by_zero_in_untaken_branch_still_raises(self):
        # evaluation is strict by contract: both branches always evaluate
        with pytest.raises(DivisionByZero):
            eval_expression(parse_expression("if(1 > 0, 1, 1/0)"), {})

    def test_unbound_identifier(self):
        with pytest.raises(UnboundIdentifier):
            eval_expression(parse_expression("a + b"), {"a": 1.0})

    def test_purity_bitwise(self):
        e = parse_expression("(a / 3 + b * 0.1) * c - abs(a)")
        env = {"a": 0.1234, "b": 9.87, "c": -3.21}
        first = eval_expression(e, env)
        assert all(eval_expression(e, env) == first for _ in range(5))
