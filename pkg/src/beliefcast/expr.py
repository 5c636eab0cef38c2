"""Arithmetic expression language used by deterministic network nodes.

Grammar (EBNF; also published in docs/network-format.md):

    expr        = or_expr ;
    or_expr     = and_expr { "or" and_expr } ;
    and_expr    = not_expr { "and" not_expr } ;
    not_expr    = "not" not_expr | comparison ;
    comparison  = additive [ ( "<" | "<=" | ">" | ">=" | "=" ) additive ] ;
    additive    = term { ( "+" | "-" ) term } ;
    term        = unary { ( "*" | "/" ) unary } ;
    unary       = "-" unary | primary ;
    primary     = NUMBER | IDENT | call | "(" expr ")" ;
    call        = ( "min" | "max" ) "(" expr "," expr ")"
                | "abs" "(" expr ")"
                | "if" "(" expr "," expr "," expr ")" ;
    IDENT       = letter | "_" , { letter | digit | "_" | "." } ;
    NUMBER      = digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ] ;

``min``, ``max``, ``abs``, ``if``, ``and``, ``or`` and ``not`` are reserved
words and cannot be identifiers.  Identifiers may contain dots so that node
ids like ``WTI.1`` can be referenced directly.

Semantics:
  * All values are IEEE-754 doubles.  Comparisons yield 1.0 / 0.0.
  * ``and`` / ``or`` / ``not`` treat any non-zero operand as true and yield
    1.0 / 0.0.  Evaluation is strict (no short-circuiting): every operand and
    both branches of ``if`` are evaluated, so a division by zero anywhere in
    the tree is always an error.  This keeps scalar and vectorized
    evaluation exactly equivalent.
  * Division by zero raises :class:`DivisionByZero` instead of producing
    inf/nan.

Format limits: tree depth <= 64 (MAX_DEPTH) and <= 10_000 nodes
(MAX_NODES); both the parser and programmatic constructors enforce them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisionByZero, ExpressionSyntaxError, UnboundIdentifier

MAX_DEPTH = 64
MAX_NODES = 10_000

_RESERVED = {"min", "max", "abs", "if", "and", "or", "not"}


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "not"
    operand: "Expression"


@dataclass(frozen=True)
class Bin:
    op: str  # + - * / < <= > >= = and or
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    fn: str  # min max abs if
    args: tuple["Expression", ...]


Expression = Num | Ident | Unary | Bin | Call


def identifiers(expr: Expression) -> set[str]:
    """All identifier names appearing anywhere in the tree."""
    out: set[str] = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Ident):
            out.add(e.name)
        elif isinstance(e, Unary):
            stack.append(e.operand)
        elif isinstance(e, Bin):
            stack.append(e.left)
            stack.append(e.right)
        elif isinstance(e, Call):
            stack.extend(e.args)
    return out


def depth(expr: Expression) -> int:
    if isinstance(expr, (Num, Ident)):
        return 1
    if isinstance(expr, Unary):
        return 1 + depth(expr.operand)
    if isinstance(expr, Bin):
        return 1 + max(depth(expr.left), depth(expr.right))
    return 1 + max((depth(a) for a in expr.args), default=0)


def node_count(expr: Expression) -> int:
    if isinstance(expr, (Num, Ident)):
        return 1
    if isinstance(expr, Unary):
        return 1 + node_count(expr.operand)
    if isinstance(expr, Bin):
        return 1 + node_count(expr.left) + node_count(expr.right)
    return 1 + sum(node_count(a) for a in expr.args)


def check_limits(expr: Expression) -> None:
    d = depth(expr)
    if d > MAX_DEPTH:
        raise ExpressionSyntaxError(f"expression depth {d} exceeds limit {MAX_DEPTH}", 0)
    n = node_count(expr)
    if n > MAX_NODES:
        raise ExpressionSyntaxError(f"expression node count {n} exceeds limit {MAX_NODES}", 0)


# --- tokenizer -----------------------------------------------------------------

_PUNCT = ("<=", ">=", "<", ">", "=", "+", "-", "*", "/", "(", ")", ",")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Returns (kind, text, position) triples; kinds: num, ident, punct, word."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_."):
                j += 1
            word = text[i:j]
            tokens.append(("word" if word in _RESERVED else "ident", word, i))
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(("punct", p, i))
                i += len(p)
                break
        else:
            raise ExpressionSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("eof", "", n))
    return tokens


# --- parser ---------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> None:
        kind, tok, at = self.peek()
        if tok != text:
            raise ExpressionSyntaxError(f"expected {text!r}, found {tok or 'end of input'!r}", at)
        self.advance()

    def parse(self) -> Expression:
        e = self.or_expr()
        kind, tok, at = self.peek()
        if kind != "eof":
            raise ExpressionSyntaxError(f"unexpected trailing input {tok!r}", at)
        return e

    def or_expr(self) -> Expression:
        e = self.and_expr()
        while self.peek()[1] == "or":
            self.advance()
            e = Bin("or", e, self.and_expr())
        return e

    def and_expr(self) -> Expression:
        e = self.not_expr()
        while self.peek()[1] == "and":
            self.advance()
            e = Bin("and", e, self.not_expr())
        return e

    def not_expr(self) -> Expression:
        if self.peek()[1] == "not":
            self.advance()
            return Unary("not", self.not_expr())
        return self.comparison()

    def comparison(self) -> Expression:
        e = self.additive()
        kind, tok, _ = self.peek()
        if kind == "punct" and tok in ("<", "<=", ">", ">=", "="):
            self.advance()
            e = Bin(tok, e, self.additive())
        return e

    def additive(self) -> Expression:
        e = self.term()
        while self.peek()[:2] in (("punct", "+"), ("punct", "-")):
            op = self.advance()[1]
            e = Bin(op, e, self.term())
        return e

    def term(self) -> Expression:
        e = self.unary()
        while self.peek()[:2] in (("punct", "*"), ("punct", "/")):
            op = self.advance()[1]
            e = Bin(op, e, self.unary())
        return e

    def unary(self) -> Expression:
        if self.peek()[:2] == ("punct", "-"):
            self.advance()
            return Unary("-", self.unary())
        return self.primary()

    def primary(self) -> Expression:
        kind, tok, at = self.advance()
        if kind == "num":
            return Num(float(tok))
        if kind == "ident":
            return Ident(tok)
        if kind == "word" and tok in ("min", "max", "abs", "if"):
            self.expect("(")
            args = [self.or_expr()]
            while self.peek()[:2] == ("punct", ","):
                self.advance()
                args.append(self.or_expr())
            self.expect(")")
            want = {"min": 2, "max": 2, "abs": 1, "if": 3}[tok]
            if len(args) != want:
                raise ExpressionSyntaxError(f"{tok} takes {want} argument(s), got {len(args)}", at)
            return Call(tok, tuple(args))
        if (kind, tok) == ("punct", "("):
            e = self.or_expr()
            self.expect(")")
            return e
        raise ExpressionSyntaxError(f"unexpected token {tok or 'end of input'!r}", at)


def parse_expression(text: str) -> Expression:
    """Parse ``text`` into an AST.  Raises ExpressionSyntaxError with position."""
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    expr = _Parser(text).parse()
    check_limits(expr)
    return expr


# --- canonical printer -----------------------------------------------------------

_PRECEDENCE = {"or": 1, "and": 2, "<": 4, "<=": 4, ">": 4, ">=": 4, "=": 4,
               "+": 5, "-": 5, "*": 6, "/": 6}


def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def print_expression(expr: Expression, _parent_prec: int = 0) -> str:
    """Canonical text form; ``parse_expression`` round-trips it."""
    if isinstance(expr, Num):
        if expr.value < 0:
            # negative literals print as a unary minus application
            inner = f"-{_fmt_num(-expr.value)}"
            return f"({inner})" if _parent_prec >= 7 else inner
        return _fmt_num(expr.value)
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Unary):
        if expr.op == "not":
            inner = print_expression(expr.operand, 3)
            text = f"not {inner}"
            return f"({text})" if _parent_prec > 3 else text
        inner = print_expression(expr.operand, 7)
        text = f"-{inner}"
        return f"({text})" if _parent_prec >= 7 else text
    if isinstance(expr, Bin):
        prec = _PRECEDENCE[expr.op]
        left = print_expression(expr.left, prec)
        # right operand binds one level tighter: all binary ops are printed
        # left-associatively, and comparisons are non-associative
        right = print_expression(expr.right, prec + 1)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if prec < _parent_prec or (prec == _parent_prec == 4) else text
    args = ", ".join(print_expression(a, 0) for a in expr.args)
    return f"{expr.fn}({args})"


# --- evaluation -------------------------------------------------------------------

def eval_expression(expr: Expression, env: dict[str, float]) -> float:
    """Scalar evaluation over an environment of node values.

    Pure: the same (expr, env) always yields a bitwise-identical double.
    """
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Ident):
        try:
            return env[expr.name]
        except KeyError:
            raise UnboundIdentifier(expr.name) from None
    if isinstance(expr, Unary):
        v = eval_expression(expr.operand, env)
        return -v if expr.op == "-" else (0.0 if v != 0.0 else 1.0)
    if isinstance(expr, Bin):
        a = eval_expression(expr.left, env)
        b = eval_expression(expr.right, env)
        op = expr.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0.0:
                raise DivisionByZero()
            return a / b
        if op == "<":
            return 1.0 if a < b else 0.0
        if op == "<=":
            return 1.0 if a <= b else 0.0
        if op == ">":
            return 1.0 if a > b else 0.0
        if op == ">=":
            return 1.0 if a >= b else 0.0
        if op == "=":
            return 1.0 if a == b else 0.0
        if op == "and":
            return 1.0 if (a != 0.0 and b != 0.0) else 0.0
        return 1.0 if (a != 0.0 or b != 0.0) else 0.0
    # Call
    vals = [eval_expression(a, env) for a in expr.args]
    if expr.fn == "min":
        return vals[0] if vals[0] <= vals[1] else vals[1]
    if expr.fn == "max":
        return vals[0] if vals[0] >= vals[1] else vals[1]
    if expr.fn == "abs":
        return abs(vals[0])
    return vals[1] if vals[0] != 0.0 else vals[2]


def eval_expression_vec(expr: Expression, env: dict[str, np.ndarray]) -> np.ndarray:
    """Vectorized evaluation: env maps identifiers to equal-length float64
    arrays; the result follows the same IEEE arithmetic element-wise as
    :func:`eval_expression`, so lane i equals the scalar evaluation over the
    i-th environment."""
    if isinstance(expr, Num):
        return np.float64(expr.value)  # broadcasts
    if isinstance(expr, Ident):
        try:
            return env[expr.name]
        except KeyError:
            raise UnboundIdentifier(expr.name) from None
    if isinstance(expr, Unary):
        v = eval_expression_vec(expr.operand, env)
        if expr.op == "-":
            return -v
        return np.where(v != 0.0, 0.0, 1.0)
    if isinstance(expr, Bin):
        a = eval_expression_vec(expr.left, env)
        b = eval_expression_vec(expr.right, env)
        op = expr.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if np.any(b == 0.0):
                raise DivisionByZero()
            return a / b
        if op == "<":
            return np.where(a < b, 1.0, 0.0)
        if op == "<=":
            return np.where(a <= b, 1.0, 0.0)
        if op == ">":
            return np.where(a > b, 1.0, 0.0)
        if op == ">=":
            return np.where(a >= b, 1.0, 0.0)
        if op == "=":
            return np.where(a == b, 1.0, 0.0)
        if op == "and":
            return np.where((a != 0.0) & (b != 0.0), 1.0, 0.0)
        return np.where((a != 0.0) | (b != 0.0), 1.0, 0.0)
    vals = [eval_expression_vec(a, env) for a in expr.args]
    if expr.fn == "min":
        return np.minimum(vals[0], vals[1])
    if expr.fn == "max":
        return np.maximum(vals[0], vals[1])
    if expr.fn == "abs":
        return np.abs(vals[0])
    return np.where(vals[0] != 0.0, vals[1], vals[2])
