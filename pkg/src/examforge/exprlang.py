"""Integer expression language for answer keys, constraints and prompt slots.

Grammar (see docs/grammar.md for the EBNF)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := INT | IDENT | "(" expr ")"

Unary minus binds looser than ``^``, so ``-a3^2`` is ``-(a3^2)``.  There is
no division: every expression over integers evaluates to an integer.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

PARAMS = ("a1", "a2", "a3", "a4", "b1", "b2", "b3", "g1", "g2", "g3")
GREEK = {
    "a1": "α1", "a2": "α2", "a3": "α3", "a4": "α4",
    "b1": "β1", "b2": "β2", "b3": "β3",
    "g1": "γ1", "g2": "γ2", "g3": "γ3",
}
MAX_EXPONENT = 12
INT_BOUND = 2**63


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, pos: int, source: str = ""):
        self.message = message
        self.pos = pos
        self.source = source
        super().__init__(f"{message} at position {pos}" + (f" in {source!r}" if source else ""))


class UnknownParameter(ExprSyntaxError):
    pass


class ParameterInExponent(ExprSyntaxError):
    pass


class UnboundParameter(ExprError):
    pass


class ExprOverflow(ExprError, ArithmeticError):
    pass


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of "+", "-", "*"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Lit, Param, Neg, BinOp, Pow]


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", start, source)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source, names, allow_negative_exponents):
        self.source = source
        self.names = names
        self.allow_neg = allow_negative_exponents
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, pos=None, cls=ExprSyntaxError):
        if pos is None:
            pos = self.peek()[2]
        return cls(message, pos, self.source)

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            found = tok[1] or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}", tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            left = BinOp("*", left, self.unary())
        return left

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] != ("op", "^"):
            return base
        self.take()
        kind, text, pos = self.peek()
        sign = 1
        if (kind, text) == ("op", "-") and self.allow_neg:
            self.take()
            sign = -1
            kind, text, pos = self.peek()
        if kind == "ident":
            raise self.error("parameter in exponent position", pos, ParameterInExponent)
        if kind != "int":
            raise self.error("exponent must be an integer literal", pos)
        self.take()
        exponent = sign * int(text)
        if abs(exponent) > MAX_EXPONENT:
            raise self.error(f"exponent {exponent} exceeds bound {MAX_EXPONENT}", pos)
        if self.peek()[:2] == ("op", "^"):
            raise self.error("chained exponent; parenthesise the base", self.peek()[2])
        return Pow(base, exponent)

    def atom(self):
        kind, text, pos = self.take()
        if kind == "int":
            return Lit(int(text))
        if kind == "ident":
            if text not in self.names:
                raise self.error(f"unknown parameter {text!r}", pos, UnknownParameter)
            return Param(text)
        if (kind, text) == ("op", "("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"unexpected {text or 'end of input'!r}", pos)


def parse_expr(source: str, extra_vars: Iterable[str] = (),
               allow_negative_exponents: bool = False) -> Expr:
    """Parse ``source`` into an expression tree.

    ``extra_vars`` admits identifiers beyond the ten canonical parameters
    (integration variables ``x``/``y``, the unknown ``p`` of a linear system,
    ``ans`` for the family's answer).  ``allow_negative_exponents`` is only
    meant for integrands; such trees cannot go through :func:`eval_expr`.
    """
    if not isinstance(source, str):
        raise TypeError("expression source must be text")
    names = frozenset(PARAMS) | frozenset(extra_vars)
    return _Parser(source, names, allow_negative_exponents).parse()


# -- serialisation -----------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2}


def _prec(e) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def serialise(e: Expr) -> str:
    """Canonical source text; ``parse_expr(serialise(e)) == e``."""
    if isinstance(e, Lit):
        return str(e.value) if e.value >= 0 else f"({e.value})"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        inner = serialise(e.operand)
        return "-" + (inner if _prec(e.operand) >= 3 else f"({inner})")
    if isinstance(e, Pow):
        base = serialise(e.base)
        if _prec(e.base) < 5:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    p = _PREC[e.op]
    left = serialise(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = serialise(e.right)
    # right operand of the same level needs parens to keep the tree shape
    if _prec(e.right) <= p:
        right = f"({right})"
    if e.op == "*":
        return f"{left}*{right}"
    return f"{left} {e.op} {right}"


# -- evaluation --------------------------------------------------------------

def _check(v: int) -> int:
    if not -INT_BOUND < v < INT_BOUND:
        raise ExprOverflow(f"intermediate value {v} outside (-2^63, 2^63)")
    return v


def eval_expr(e: Expr, env: Mapping[str, int]) -> int:
    """Exact integer value of ``e`` under ``env``."""
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Param):
        try:
            return int(env[e.name])
        except KeyError:
            raise UnboundParameter(f"parameter {e.name!r} is not bound") from None
    if isinstance(e, Neg):
        return _check(-eval_expr(e.operand, env))
    if isinstance(e, Pow):
        if e.exponent < 0:
            raise ExprError("negative exponent has no integer value")
        return _check(eval_expr(e.base, env) ** e.exponent)
    a = eval_expr(e.left, env)
    b = eval_expr(e.right, env)
    if e.op == "+":
        return _check(a + b)
    if e.op == "-":
        return _check(a - b)
    return _check(a * b)


def free_params(e: Expr) -> frozenset:
    """Identifiers occurring in ``e``.  Use ``sorted`` for a stable order."""
    if isinstance(e, Param):
        return frozenset([e.name])
    if isinstance(e, Lit):
        return frozenset()
    if isinstance(e, (Neg,)):
        return free_params(e.operand)
    if isinstance(e, Pow):
        return free_params(e.base)
    return free_params(e.left) | free_params(e.right)


def substitute(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    if isinstance(e, Param):
        return bindings.get(e.name, e)
    if isinstance(e, Lit):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, bindings))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, bindings), e.exponent)
    return BinOp(e.op, substitute(e.left, bindings), substitute(e.right, bindings))


def to_spreadsheet(e: Expr, refs: Mapping[str, str]) -> str:
    """Compile to spreadsheet formula syntax, mapping parameters to cells.

    Spreadsheet negation binds tighter than ``^`` (``-2^2`` is 4 there), so a
    negated power is emitted as ``-(x^n)``.
    """
    if isinstance(e, Lit):
        return str(e.value) if e.value >= 0 else f"({e.value})"
    if isinstance(e, Param):
        try:
            return refs[e.name]
        except KeyError:
            raise UnboundParameter(f"no cell for parameter {e.name!r}") from None
    if isinstance(e, Neg):
        inner = to_spreadsheet(e.operand, refs)
        if isinstance(e.operand, (Lit, Param, Neg)):
            return "-" + inner
        return f"-({inner})"
    if isinstance(e, Pow):
        base = to_spreadsheet(e.base, refs)
        if not isinstance(e.base, (Lit, Param)) or (isinstance(e.base, Lit) and e.base.value < 0):
            base = f"({base})"
        return f"{base}^{e.exponent}"
    p = _PREC[e.op]
    left = to_spreadsheet(e.left, refs)
    if _prec(e.left) < p:
        left = f"({left})"
    right = to_spreadsheet(e.right, refs)
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left}{e.op}{right}"


# -- prompt templates --------------------------------------------------------

@dataclass(frozen=True)
class PromptTemplate:
    """Literal text interleaved with ``{expr}`` slots.  ``{{``/``}}`` escape."""

    segments: tuple  # of str | Expr

    @property
    def slots(self):
        return [s for s in self.segments if not isinstance(s, str)]

    def free_params(self) -> frozenset:
        out = frozenset()
        for s in self.slots:
            out |= free_params(s)
        return out

    def lines(self):
        """Split into per-line segment lists (newlines only occur in text)."""
        lines = [[]]
        for seg in self.segments:
            if isinstance(seg, str):
                parts = seg.split("\n")
                for k, part in enumerate(parts):
                    if k:
                        lines.append([])
                    if part:
                        lines[-1].append(part)
            else:
                lines[-1].append(seg)
        return lines


def parse_template(source: str) -> PromptTemplate:
    segments = []
    buf = []
    i = 0
    while i < len(source):
        ch = source[i]
        if source.startswith("{{", i) or source.startswith("}}", i):
            buf.append(ch)
            i += 2
            continue
        if ch == "}":
            raise ExprSyntaxError("unmatched '}'", i, source)
        if ch == "{":
            end = source.find("}", i + 1)
            if end < 0:
                raise ExprSyntaxError("unterminated slot", i, source)
            if buf:
                segments.append("".join(buf))
                buf = []
            inner = source[i + 1:end]
            try:
                segments.append(parse_expr(inner))
            except ExprSyntaxError as exc:
                raise type(exc)(exc.message, i + 1 + exc.pos, source) from None
            i = end + 1
            continue
        buf.append(ch)
        i += 1
    if buf:
        segments.append("".join(buf))
    return PromptTemplate(tuple(segments))


def render_prompt(t: PromptTemplate, env: Mapping[str, int]) -> str:
    return "".join(s if isinstance(s, str) else str(eval_expr(s, env)) for s in t.segments)
