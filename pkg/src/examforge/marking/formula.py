"""A small interpreter for spreadsheet cell formulas.

Covers what the marking copy emits plus a little more: numbers, strings,
booleans, cell references and ranges, ``+ - * / ^ &``, comparisons, and
the functions IF, SUM, AND, OR, NOT, ABS.  Operator precedence follows
the spreadsheet convention, where prefix minus binds tighter than ``^``
(so ``-2^2`` is 4).  Arguments may be separated by ``,`` or ``;``.  A
blank cell reads as 0 in arithmetic and equals both 0 and ``""``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..workbook.cells import CellAddress, addr


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class _Tok:
    kind: str  # num str ref range name op sep lp rp bool
    text: str
    pos: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<str>"(?:[^"]|"")*")
  | (?P<range>\$?[A-Za-z]{1,3}\$?[0-9]+:\$?[A-Za-z]{1,3}\$?[0-9]+)
  | (?P<num>[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?|\.[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_.]*\$?[0-9]*)
  | (?P<ref>\$[A-Za-z]{1,3}\$?[0-9]+)
  | (?P<op><>|<=|>=|[-+*/^&=<>%])
  | (?P<sep>[,;])
  | (?P<lp>\()
  | (?P<rp>\))
""", re.VERBOSE)
_REF = re.compile(r"^\$?[A-Za-z]{1,3}\$?[0-9]+$")


def tokenize(src: str) -> list:
    out = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if not m:
            raise FormulaError(f"unexpected character {src[i]!r} at {i}")
        kind = m.lastgroup
        text = m.group()
        if kind == "name":
            up = text.upper()
            if _REF.match(text):
                kind = "ref"
            elif up in ("TRUE", "FALSE"):
                kind = "bool"
        if kind != "ws":
            out.append(_Tok(kind, text, i))
        i = m.end()
    return out


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: object


@dataclass(frozen=True)
class Ref:
    cell: CellAddress


@dataclass(frozen=True)
class Range:
    first: CellAddress
    last: CellAddress

    def cells(self):
        r0, r1 = sorted((self.first.row, self.last.row))
        c0, c1 = sorted((self.first.col, self.last.col))
        return [CellAddress(r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)]


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


_LEVELS = (("=", "<>", "<", ">", "<=", ">="), ("&",), ("+", "-"), ("*", "/"), ("^",))


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise FormulaError("unexpected end of formula")
        self.i += 1
        return t

    def binary(self, level):
        if level == len(_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while (t := self.peek()) is not None and t.kind == "op" and t.text in _LEVELS[level]:
            self.i += 1
            left = Binary(t.text, left, self.binary(level + 1))
        return left

    def unary(self):
        t = self.peek()
        if t is not None and t.kind == "op" and t.text in "+-":
            self.i += 1
            return Unary(t.text, self.unary())
        node = self.atom()
        while (t := self.peek()) is not None and t.kind == "op" and t.text == "%":
            self.i += 1
            node = Binary("/", node, Const(100))
        return node

    def atom(self):
        t = self.take()
        if t.kind == "num":
            v = float(t.text)
            return Const(int(v) if v.is_integer() and "e" not in t.text.lower() and "." not in t.text else v)
        if t.kind == "str":
            return Const(t.text[1:-1].replace('""', '"'))
        if t.kind == "bool":
            return Const(t.text.upper() == "TRUE")
        if t.kind == "ref":
            return Ref(addr(t.text.replace("$", "")))
        if t.kind == "range":
            a, b = t.text.replace("$", "").split(":")
            return Range(addr(a), addr(b))
        if t.kind == "lp":
            e = self.binary(0)
            if self.take().kind != "rp":
                raise FormulaError(f"expected ')' near {t.pos}")
            return e
        if t.kind == "name":
            if (n := self.peek()) is None or n.kind != "lp":
                raise FormulaError(f"unknown name {t.text!r}")
            self.i += 1
            args = []
            if (n := self.peek()) is not None and n.kind == "rp":
                self.i += 1
                return Call(t.text.upper(), ())
            while True:
                args.append(self.binary(0))
                n = self.take()
                if n.kind == "rp":
                    break
                if n.kind != "sep":
                    raise FormulaError(f"expected ',' or ')' at {n.pos}")
            return Call(t.text.upper(), tuple(args))
        raise FormulaError(f"unexpected {t.text!r} at {t.pos}")


def parse_formula(src: str):
    src = src[1:] if src.startswith("=") else src
    p = _Parser(tokenize(src))
    node = p.binary(0)
    if p.peek() is not None:
        raise FormulaError(f"trailing input at {p.peek().pos}")
    return node


# -- evaluation --------------------------------------------------------------

def _num(v):
    if v is None:
        return 0
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, (int, float)):
        return v
    try:
        f = float(v)
    except (TypeError, ValueError):
        raise FormulaError(f"#VALUE!: {v!r} is not a number") from None
    return int(f) if f.is_integer() else f


def _truth(v):
    if isinstance(v, str):
        u = v.upper()
        if u in ("TRUE", "FALSE"):
            return u == "TRUE"
        raise FormulaError(f"#VALUE!: {v!r} is not a truth value")
    return bool(_num(v))


def _compare(op, a, b):
    # blank takes the type of the other side
    if a is None:
        a = "" if isinstance(b, str) else (False if isinstance(b, bool) else 0)
    if b is None:
        b = "" if isinstance(a, str) else (False if isinstance(a, bool) else 0)
    rank = lambda v: 2 if isinstance(v, bool) else (1 if isinstance(v, str) else 0)  # noqa: E731
    ra, rb = rank(a), rank(b)
    if ra != rb:
        key_a, key_b = ra, rb
    elif ra == 1:
        key_a, key_b = a.lower(), b.lower()
    else:
        key_a, key_b = a, b
    return {"=": key_a == key_b, "<>": key_a != key_b, "<": key_a < key_b,
            ">": key_a > key_b, "<=": key_a <= key_b, ">=": key_a >= key_b}[op]


def _values(node, get):
    if isinstance(node, Range):
        return [get(c) for c in node.cells()]
    return [evaluate(node, get)]


def evaluate(node, get):
    """Evaluate a parsed formula; ``get(CellAddress)`` returns a cell value."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Ref):
        return get(node.cell)
    if isinstance(node, Range):
        raise FormulaError("#VALUE!: range used as a single value")
    if isinstance(node, Unary):
        v = _num(evaluate(node.operand, get))
        return -v if node.op == "-" else v
    if isinstance(node, Binary):
        a = evaluate(node.left, get)
        b = evaluate(node.right, get)
        op = node.op
        if op in ("=", "<>", "<", ">", "<=", ">="):
            return _compare(op, a, b)
        if op == "&":
            return f"{'' if a is None else a}{'' if b is None else b}"
        x, y = _num(a), _num(b)
        if op == "+":
            return x + y
        if op == "-":
            return x - y
        if op == "*":
            return x * y
        if op == "/":
            if y == 0:
                raise FormulaError("#DIV/0!")
            q = x / y
            return int(q) if isinstance(q, float) and q.is_integer() else q
        if op == "^":
            r = x ** y
            return int(r) if isinstance(r, float) and r.is_integer() else r
    if isinstance(node, Call):
        return _call(node, get)
    raise FormulaError(f"cannot evaluate {node!r}")


def _call(node, get):
    name, args = node.name, node.args
    if name == "IF":
        if not 2 <= len(args) <= 3:
            raise FormulaError("IF takes 2 or 3 arguments")
        if _truth(evaluate(args[0], get)):
            return evaluate(args[1], get)
        return evaluate(args[2], get) if len(args) == 3 else False
    if name == "SUM":
        total = 0
        for a in args:
            for v in _values(a, get):
                # ranges skip text and blanks; direct arguments are coerced
                if isinstance(a, Range) and (v is None or isinstance(v, (str, bool))):
                    continue
                total += _num(v)
        return total
    if name in ("AND", "OR"):
        vals = [_truth(v) for a in args for v in _values(a, get) if v is not None]
        if not vals:
            raise FormulaError(f"#VALUE!: {name} without values")
        return all(vals) if name == "AND" else any(vals)
    if name == "NOT":
        if len(args) != 1:
            raise FormulaError("NOT takes 1 argument")
        return not _truth(evaluate(args[0], get))
    if name == "ABS":
        if len(args) != 1:
            raise FormulaError("ABS takes 1 argument")
        return abs(_num(evaluate(args[0], get)))
    raise FormulaError(f"#NAME?: unsupported function {name}")


def eval_formula(src: str, cells) -> object:
    """Evaluate ``src`` against a mapping of addresses to values or formulas.

    Keys may be ``CellAddress`` or text like ``"G27"``.  Values that are
    strings starting with ``=`` are evaluated as formulas themselves.
    """
    table = {addr(k): v for k, v in cells.items()}
    busy = set()

    def get(a):
        v = table.get(a)
        if isinstance(v, str) and v.startswith("="):
            if a in busy:
                raise FormulaError(f"circular reference at {a}")
            busy.add(a)
            try:
                return evaluate(parse_formula(v), get)
            finally:
                busy.discard(a)
        return v

    return evaluate(parse_formula(src), get)
