"""Exact iterated double integrals of polynomial integrands.

Regions are given as dicts (the exam-spec JSON form):

``{"outer": ["y", lo, hi], "inner": ["x", lo, hi]}``
    iterated integral, inner bounds may mention the outer variable;
``{"rectangle": {"x": [lo, hi], "y": [lo, hi]}}``
    shorthand for inner ``x``, outer ``y``;
``{"triangle": [p, q]}``
    the triangle with vertices (0,0), (p,0), (0,q), for p, q > 0.

Bounds are integer expressions over the parameters (and ``ans``).
Integrals are oriented: ``lo > hi`` flips the sign.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..exprlang import Lit, Neg, Param, Pow, UnboundParameter, free_params, parse_expr, serialise
from .poly import Poly, UnsupportedIntegral, poly_from_expr

VARS = ("x", "y")
_BOUND_VARS = ("x", "y", "ans")


def parse_integrand(source):
    if not isinstance(source, str):
        return source
    return parse_expr(source, extra_vars=_BOUND_VARS, allow_negative_exponents=True)


def _bound(source):
    if not isinstance(source, str):
        source = str(source)
    return parse_expr(source, extra_vars=_BOUND_VARS)


@dataclass(frozen=True)
class Region:
    kind: str  # "iterated" or "triangle"
    outer_var: str = ""
    outer_lo: object = None
    outer_hi: object = None
    inner_var: str = ""
    inner_lo: object = None
    inner_hi: object = None
    legs: tuple = ()

    def exprs(self):
        if self.kind == "triangle":
            return list(self.legs)
        return [self.outer_lo, self.outer_hi, self.inner_lo, self.inner_hi]

    def to_dict(self) -> dict:
        if self.kind == "triangle":
            return {"triangle": [serialise(e) for e in self.legs]}
        return {"outer": [self.outer_var, serialise(self.outer_lo), serialise(self.outer_hi)],
                "inner": [self.inner_var, serialise(self.inner_lo), serialise(self.inner_hi)]}


def parse_region(spec) -> Region:
    if isinstance(spec, Region):
        return spec
    if not isinstance(spec, dict):
        raise UnsupportedIntegral(f"region must be an object, got {spec!r}")
    if "triangle" in spec:
        p, q = spec["triangle"]
        return Region("triangle", legs=(_bound(p), _bound(q)))
    if "rectangle" in spec:
        r = spec["rectangle"]
        return Region("iterated", "y", _bound(r["y"][0]), _bound(r["y"][1]),
                      "x", _bound(r["x"][0]), _bound(r["x"][1]))
    if "outer" in spec and "inner" in spec:
        ov, olo, ohi = spec["outer"]
        iv, ilo, ihi = spec["inner"]
        if {ov, iv} != set(VARS):
            raise UnsupportedIntegral(f"integration variables must be x and y, got {ov}, {iv}")
        region = Region("iterated", ov, _bound(olo), _bound(ohi), iv, _bound(ilo), _bound(ihi))
        for e in (region.outer_lo, region.outer_hi):
            if _mentions(e, VARS):
                raise UnsupportedIntegral("outer bounds must not mention x or y")
        if _mentions(region.inner_lo, (iv,)) or _mentions(region.inner_hi, (iv,)):
            raise UnsupportedIntegral("inner bounds must not mention the inner variable")
        return region
    raise UnsupportedIntegral(f"unsupported region {spec!r}")


def _mentions(e, names) -> bool:
    return bool(free_params(e) & frozenset(names))


def integral_poly(integrand, region, bindings=None) -> Poly:
    """The integral as an exact polynomial in whatever stays unbound."""
    bindings = dict(bindings or {})
    f = poly_from_expr(parse_integrand(integrand), bindings)
    region = parse_region(region)
    if region.kind == "triangle":
        p, q = (poly_from_expr(e, bindings) for e in region.legs)
        g = f.subs("x", p * Poly.var("_u")).subs("y", q * Poly.var("_v")) * p * q
        g = g.integrate("_v", Poly.const(0), Poly.const(1) - Poly.var("_u"))
        return g.integrate("_u", Poly.const(0), Poly.const(1))
    g = f.integrate(region.inner_var, poly_from_expr(region.inner_lo, bindings),
                    poly_from_expr(region.inner_hi, bindings))
    return g.integrate(region.outer_var, poly_from_expr(region.outer_lo, bindings),
                       poly_from_expr(region.outer_hi, bindings))


def integral_oracle(integrand, region, env) -> Fraction:
    """Exact value of the integral for one parameter assignment."""
    region = parse_region(region)
    if region.kind == "triangle":
        for e in region.legs:
            if eval_float(e, env) <= 0:
                raise UnsupportedIntegral("triangle legs must be positive")
    value = integral_poly(integrand, region, {k: Poly.const(v) for k, v in env.items()})
    if value.variables():
        raise UnboundParameter(f"unbound identifiers {sorted(value.variables())}")
    return value.constant_value()


def eval_float(e, env):
    """Floating-point (or numpy-broadcast) evaluation, for numeric cross-checks."""
    if isinstance(e, Lit):
        return float(e.value)
    if isinstance(e, Param):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundParameter(f"parameter {e.name!r} is not bound") from None
    if isinstance(e, Neg):
        return -eval_float(e.operand, env)
    if isinstance(e, Pow):
        return eval_float(e.base, env) ** float(e.exponent)
    a = eval_float(e.left, env)
    b = eval_float(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    return a * b


def integral_numeric(integrand, region, env, n: int = 400) -> float:
    """Composite midpoint rule on an ``n`` x ``n`` grid of the iterated integral."""
    f = parse_integrand(integrand)
    region = parse_region(region)
    env = {k: float(v) for k, v in env.items()}
    if region.kind == "triangle":
        p, q = (eval_float(e, env) for e in region.legs)
        outer_var, olo, ohi, inner_var = "x", 0.0, p, "y"
        inner_lo = lambda t: np.zeros_like(t)
        inner_hi = lambda t: q * (1.0 - t / p)
    else:
        outer_var, inner_var = region.outer_var, region.inner_var
        olo = eval_float(region.outer_lo, env)
        ohi = eval_float(region.outer_hi, env)
        inner_lo = lambda t: eval_float(region.inner_lo, {**env, outer_var: t}) + 0 * t
        inner_hi = lambda t: eval_float(region.inner_hi, {**env, outer_var: t}) + 0 * t
    k = (np.arange(n) + 0.5) / n
    h_out = (ohi - olo) / n
    t = olo + k * (ohi - olo)  # outer midpoints, shape (n,)
    lo, hi = inner_lo(t), inner_hi(t)
    h_in = (hi - lo) / n
    s = lo[:, None] + k[None, :] * (hi - lo)[:, None]  # inner midpoints, (n, n)
    vals = eval_float(f, {**env, outer_var: t[:, None], inner_var: s}) + 0 * s
    return float(np.sum(vals.sum(axis=1) * h_in) * h_out)

