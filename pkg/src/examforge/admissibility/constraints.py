"""Admissibility constraint kinds.

Every constraint reduces to a list of checks.  A polynomial check is a
``Poly`` in the parameters plus a test (``zero``, ``nonzero``,
``positive``) and can be evaluated over a whole domain grid at once; a
point check is a callable run on each parameter assignment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..exprlang import PARAMS, eval_expr, free_params, parse_expr, serialise
from .exact import rank_exact
from .integrals import integral_poly, parse_integrand, parse_region
from .poly import Poly, poly_from_expr

_ANS = ("ans",)


def _expr(source, extra=()):
    if not isinstance(source, str):
        source = str(source)
    return parse_expr(source, extra_vars=_ANS + tuple(extra))


def _matrix(rows, extra=()):
    m = [[_expr(x, extra) for x in row] for row in rows]
    if not m or any(len(r) != len(m[0]) for r in m):
        raise ValueError("matrix template must be a non-empty rectangular grid")
    return tuple(tuple(r) for r in m)


def _names(exprs) -> frozenset:
    out = frozenset()
    for e in exprs:
        out |= free_params(e)
    return out


def det_poly(m) -> Poly:
    """Symbolic determinant by cofactor expansion (templates are small)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Poly()
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_poly(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


@dataclass(frozen=True)
class PolyCheck:
    test: str  # "zero" | "nonzero" | "positive"
    poly: Poly
    what: str


@dataclass(frozen=True)
class PointCheck:
    fn: object  # env -> None | str
    what: str


@dataclass(frozen=True)
class Constraint:
    kind: str = ""
    source: dict = field(default_factory=dict, compare=False)

    def exprs(self) -> list:
        raise NotImplementedError

    def params(self) -> frozenset:
        return _names(self.exprs()) & frozenset(PARAMS)

    def uses_answer(self) -> bool:
        return "ans" in _names(self.exprs())

    def checks(self, answer) -> list:
        raise NotImplementedError

    def detail(self, env) -> str:
        return ""

    def to_dict(self) -> dict:
        return dict(self.source)


def _ans_bindings(answer):
    return {"ans": poly_from_expr(answer)}


@dataclass(frozen=True)
class Nonzero(Constraint):
    expr: object = None

    def exprs(self):
        return [self.expr]

    def checks(self, answer):
        return [PolyCheck("nonzero", poly_from_expr(self.expr, _ans_bindings(answer)),
                          f"{serialise(self.expr)} != 0")]


@dataclass(frozen=True)
class Positive(Constraint):
    expr: object = None

    def exprs(self):
        return [self.expr]

    def checks(self, answer):
        return [PolyCheck("positive", poly_from_expr(self.expr, _ans_bindings(answer)),
                          f"{serialise(self.expr)} > 0")]


@dataclass(frozen=True)
class Distinct(Constraint):
    a: object = None
    b: object = None

    def exprs(self):
        return [self.a, self.b]

    def checks(self, answer):
        b = _ans_bindings(answer)
        return [PolyCheck("nonzero", poly_from_expr(self.a, b) - poly_from_expr(self.b, b),
                          f"{serialise(self.a)} != {serialise(self.b)}")]


def _matrix_poly(m, bindings):
    return [[poly_from_expr(e, bindings) for e in row] for row in m]


@dataclass(frozen=True)
class MatrixUnimodular(Constraint):
    matrix: tuple = ()

    def exprs(self):
        return [e for row in self.matrix for e in row]

    def checks(self, answer):
        if len(self.matrix) != len(self.matrix[0]):
            raise ValueError("matrix_unimodular needs a square matrix")
        d = det_poly(_matrix_poly(self.matrix, _ans_bindings(answer)))
        return [PolyCheck("zero", d * d - Poly.const(1), "det = ±1")]

    def detail(self, env):
        from .exact import det_exact
        return f"det = {det_exact([[eval_expr(e, env) for e in row] for row in self.matrix])}"


@dataclass(frozen=True)
class InverseEntryMatches(Constraint):
    matrix: tuple = ()
    row: int = 1
    col: int = 1
    equals: object = None

    def exprs(self):
        return [e for r in self.matrix for e in r] + [self.equals]

    def checks(self, answer):
        n = len(self.matrix)
        if n != len(self.matrix[0]) or not (1 <= self.row <= n and 1 <= self.col <= n):
            raise ValueError("inverse_entry_matches needs a square matrix and an entry inside it")
        b = _ans_bindings(answer)
        m = _matrix_poly(self.matrix, b)
        d = det_poly(m)
        i, j = self.row - 1, self.col - 1
        # (A^-1)_ij = (-1)^(i+j) * minor(j, i) / det
        minor = [r[:i] + r[i + 1:] for k, r in enumerate(m) if k != j]
        cof = det_poly(minor) if minor else Poly.const(1)
        if (i + j) % 2:
            cof = -cof
        target = poly_from_expr(self.equals, b)
        return [PolyCheck("nonzero", d, "matrix invertible"),
                PolyCheck("zero", cof - target * d,
                          f"inverse entry ({self.row},{self.col}) = {serialise(self.equals)}")]

    def detail(self, env):
        from .exact import SingularMatrix, inverse_entry_exact
        try:
            v = inverse_entry_exact([[eval_expr(e, env) for e in r] for r in self.matrix],
                                    self.row, self.col)
        except SingularMatrix:
            return "matrix is singular"
        return f"inverse entry = {v}, expected {eval_expr(self.equals, env)}"


@dataclass(frozen=True)
class SystemInconsistentAt(Constraint):
    matrix: tuple = ()  # augmented matrix, last column is the right-hand side
    unknown: str = "p"
    at: object = None

    def exprs(self):
        return [e for r in self.matrix for e in r] + [self.at]

    def _ranks(self, env):
        value = eval_expr(self.at, env)
        full = {**env, self.unknown: value}
        aug = [[eval_expr(e, full) for e in r] for r in self.matrix]
        coef = [r[:-1] for r in aug]
        return rank_exact(coef), rank_exact(aug)

    def checks(self, answer):
        def fn(env):
            rc, ra = self._ranks(env)
            if rc < ra:
                return None
            return f"consistent: rank {rc} (coefficients) vs {ra} (augmented)"
        return [PointCheck(fn, f"system inconsistent at {self.unknown} = {serialise(self.at)}")]

    def detail(self, env):
        rc, ra = self._ranks(env)
        return f"ranks {rc}/{ra}"


@dataclass(frozen=True)
class IntegralMatches(Constraint):
    integrand: object = None
    region: object = None
    equals: object = None
    divisor: int = 1

    def exprs(self):
        return [self.integrand, self.equals] + self.region.exprs()

    def integral(self, answer) -> Poly:
        return integral_poly(self.integrand, self.region, _ans_bindings(answer))

    def checks(self, answer):
        value = self.integral(answer)
        target = poly_from_expr(self.equals, _ans_bindings(answer))
        return [PolyCheck("zero", value * self.divisor - target,
                          f"integral = {serialise(self.equals)}"
                          + (f"/{self.divisor}" if self.divisor != 1 else ""))]

    def detail(self, env, answer=None):
        b = {k: Poly.const(v) for k, v in env.items()}
        v = integral_poly(self.integrand, self.region, b).constant_value()
        expected = Fraction(eval_expr(self.equals, env), self.divisor)
        note = "" if v.denominator == 1 else " (not an integer)"
        return f"integral = {v}{note}, expected {expected}"


PROBES = ("1", "x", "y", "x^2", "x*y", "y^2", "x^3", "x^2*y", "x*y^2", "y^3")


@dataclass(frozen=True)
class SameRegion(Constraint):
    """Two iterated descriptions of one region, compared through moments."""

    region: object = None
    other: object = None

    def exprs(self):
        return self.region.exprs() + self.other.exprs()

    def checks(self, answer):
        b = _ans_bindings(answer)
        out = []
        for probe in PROBES:
            f = parse_integrand(probe)
            out.append(PolyCheck("zero", integral_poly(f, self.region, b) - integral_poly(f, self.other, b),
                                 f"moment {probe} agrees"))
        return out


_KINDS = {
    "nonzero": lambda d: Nonzero("nonzero", d, _expr(d["expr"])),
    "positive": lambda d: Positive("positive", d, _expr(d["expr"])),
    "distinct": lambda d: Distinct("distinct", d, _expr(d["a"]), _expr(d["b"])),
    "matrix_unimodular": lambda d: MatrixUnimodular("matrix_unimodular", d, _matrix(d["matrix"])),
    "inverse_entry_matches": lambda d: InverseEntryMatches(
        "inverse_entry_matches", d, _matrix(d["matrix"]), int(d["row"]), int(d["col"]),
        _expr(d.get("equals", "ans"))),
    "system_inconsistent_at": lambda d: SystemInconsistentAt(
        "system_inconsistent_at", d, _matrix(d["matrix"], (d.get("unknown", "p"),)),
        d.get("unknown", "p"), _expr(d.get("at", "ans"))),
    "integral_matches": lambda d: IntegralMatches(
        "integral_matches", d, parse_integrand(d["integrand"]), parse_region(d["region"]),
        _expr(d.get("equals", "ans")), int(d.get("divisor", 1))),
    "same_region": lambda d: SameRegion("same_region", d, parse_region(d["region"]),
                                        parse_region(d["other"])),
}

KINDS = tuple(_KINDS)


def constraint_from_dict(d: dict) -> Constraint:
    kind = d.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown constraint kind {kind!r}; expected one of {', '.join(KINDS)}")
    try:
        return _KINDS[kind](d)
    except KeyError as exc:
        raise ValueError(f"constraint {kind}: missing field {exc.args[0]!r}") from None
