"""Sparse multivariate (Laurent) polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Mapping

from ..exprlang import BinOp, Lit, Neg, Param, Pow, UnboundParameter


class UnsupportedIntegral(ValueError):
    pass


def _mono_mul(a: tuple, b: tuple) -> tuple:
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in exps.items() if e))


class Poly:
    """Mapping monomial -> Fraction; a monomial is a sorted tuple of (var, exp)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Poly":
        return cls({((name, exp),): Fraction(1)})

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"{v}^{e}" if e != 1 else v for v, e in m)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(parts) + ")"

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = other if isinstance(other, Poly) else Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def __mul__(self, other):
        other = other if isinstance(other, Poly) else Poly.const(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return Poly({m: c / Fraction(k) for m, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) == 1:
                (m, c), = self.terms.items()
                return Poly({tuple((v, e * n) for v, e in m): Fraction(1) / c ** -n})
            raise UnsupportedIntegral("negative power of a non-monomial")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m)

    def constant_value(self):
        if self.variables():
            raise ValueError(f"{self!r} is not constant")
        return self.terms.get((), Fraction(0))

    def subs(self, name: str, value: "Poly") -> "Poly":
        value = value if isinstance(value, Poly) else Poly.const(value)
        out = Poly()
        cache = {}
        for m, c in self.terms.items():
            rest = tuple((v, e) for v, e in m if v != name)
            e = dict(m).get(name, 0)
            if e not in cache:
                if e < 0 and value.variables():
                    raise UnsupportedIntegral(
                        f"cannot substitute a non-constant bound into {name}^{e}")
                if e < 0 and value.is_zero():
                    raise ZeroDivisionError(f"{name}^{e} at {name}=0")
                cache[e] = value ** e
            out = out + Poly({rest: c}) * cache[e]
        return out

    def subs_many(self, values: Mapping) -> "Poly":
        out = self
        for name, value in values.items():
            out = out.subs(name, value)
        return out

    def evaluate(self, env: Mapping) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t *= Fraction(env[v]) ** e
            total += t
        return total

    def antiderivative(self, name: str) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(name, 0)
            if e == -1:
                raise UnsupportedIntegral(f"antiderivative of {name}^-1 is not polynomial")
            exps[name] = e + 1
            mono = tuple(sorted((v, k) for v, k in exps.items() if k))
            out[mono] = out.get(mono, 0) + c / (e + 1)
        return Poly(out)

    def integrate(self, name: str, lo: "Poly", hi: "Poly") -> "Poly":
        F = self.antiderivative(name)
        return F.subs(name, hi) - F.subs(name, lo)

    def scaled_to_integers(self):
        """(D, {monomial: int}) with ``D * self`` integer-coefficient, D > 0."""
        d = 1
        for c in self.terms.values():
            d = lcm(d, c.denominator)
        return d, {m: int(c * d) for m, c in self.terms.items()}


def poly_from_expr(e, bindings: Mapping | None = None) -> Poly:
    """Expand an expression tree.  ``bindings`` maps names to replacement Polys;
    unbound identifiers stay symbolic."""
    bindings = bindings or {}
    if isinstance(e, Lit):
        return Poly.const(e.value)
    if isinstance(e, Param):
        b = bindings.get(e.name)
        if b is None:
            return Poly.var(e.name)
        return b if isinstance(b, Poly) else Poly.const(b)
    if isinstance(e, Neg):
        return -poly_from_expr(e.operand, bindings)
    if isinstance(e, Pow):
        return poly_from_expr(e.base, bindings) ** e.exponent
    if isinstance(e, BinOp):
        a = poly_from_expr(e.left, bindings)
        b = poly_from_expr(e.right, bindings)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return a * b
    raise TypeError(f"not an expression: {e!r}")


def require_bound(p: Poly, allowed) -> None:
    extra = p.variables() - frozenset(allowed)
    if extra:
        raise UnboundParameter(f"unbound identifiers {sorted(extra)}")
