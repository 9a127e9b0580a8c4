import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from examforge.admissibility import (
    DomainSpec, DomainTooLarge, Poly, SingularMatrix, UnsupportedIntegral, check_family,
    constraint_from_dict, det_exact, integral_numeric, integral_oracle, inverse_entry_exact,
    inverse_exact, make_unimodular, parse_region, rank_exact,
)
from examforge.admissibility.unimodular import ConstructionFailed, template_strings
from examforge.exprlang import eval_expr, parse_expr
from examforge.model import spec_from_dict


# -- independent oracles -------------------------------------------------------

def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


int_matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n))


@given(int_matrices)
def test_det_matches_leibniz(m):
    assert det_exact(m) == leibniz_det(m)


@given(int_matrices)
def test_adjugate_identity(m):
    d = det_exact(m)
    if d == 0:
        with pytest.raises(SingularMatrix):
            inverse_exact(m)
        return
    inv = inverse_exact(m)
    n = len(m)
    for i in range(n):
        for j in range(n):
            assert sum(m[i][k] * inv[k][j] for k in range(n)) == int(i == j)
            # A^-1 = adj(A)/det: the (i,j) entry is the (j,i) cofactor over det
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(m) if k != j]
            cof = (-1) ** (i + j) * (leibniz_det(minor) if minor else 1)
            assert inv[i][j] == Fraction(cof, d)


@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_rank_matches_numpy(rows, cols, data):
    m = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=cols, max_size=cols),
                           min_size=rows, max_size=rows))
    assert rank_exact(m) == np.linalg.matrix_rank(np.array(m, dtype=float))


def test_inverse_entry_bounds():
    with pytest.raises(IndexError):
        inverse_entry_exact([[1, 0], [0, 1]], 3, 1)


# -- polynomials and integrals -------------------------------------------------

def test_poly_arithmetic():
    x, y = Poly.var("x"), Poly.var("y")
    p = (x + y) ** 2 - x * x - y * y
    assert p == Poly.var("x") * Poly.var("y") * 2
    assert p.evaluate({"x": 3, "y": 4}) == 24
    assert (p / 2).scaled_to_integers()[0] == 1


def test_question1_integral_worked_value():
    region = {"outer": ["y", "0", "a3"], "inner": ["x", "2*y - 3", "g3"]}
    assert integral_oracle("4*x*y", region, {"a3": 2, "g3": 7}) == 192


def test_triangle_requires_positive_legs():
    with pytest.raises(UnsupportedIntegral):
        integral_oracle("1", {"triangle": ["g2", "g3"]}, {"g2": 0, "g3": 1})


def test_region_validation():
    with pytest.raises(UnsupportedIntegral):
        parse_region({"outer": ["y", "0", "x"], "inner": ["x", "0", "1"]})
    with pytest.raises(UnsupportedIntegral):
        parse_region({"outer": ["y", "0", "1"], "inner": ["z", "0", "1"]})


def test_reciprocal_integrand():
    region = {"outer": ["y", "0", "3"], "inner": ["x", "1", "2"]}
    assert integral_oracle("x^-2", region, {}) == Fraction(3, 2)


coeffs = st.integers(-5, 5)


@settings(max_examples=50)
@given(coeffs, coeffs, coeffs, coeffs, st.integers(0, 3), st.integers(1, 4), st.integers(0, 3),
       st.integers(1, 4), st.booleans())
def test_exact_integral_matches_midpoint_rule(c0, c1, c2, c3, lo, width, ilo, iw, triangle):
    integrand = f"{c0} + {c1}*x + {c2}*y + {c3}*x*y"
    if triangle:
        region = {"triangle": [str(width), str(iw)]}
    else:
        region = {"outer": ["y", str(lo), str(lo + width)],
                  "inner": ["x", f"{ilo} - y", str(ilo + iw)]}
    exact = integral_oracle(integrand, region, {})
    approx = integral_numeric(integrand, region, {}, n=200)
    # midpoint error is O(h^2) with the second derivative scaled by extent^4
    extent = max(width, iw, lo + width, ilo + iw) + 1
    scale = (1 + abs(c0) + abs(c1) + abs(c2) + abs(c3)) * extent ** 4
    assert abs(float(exact) - approx) < 1e-5 * scale


# -- constraints and the checker -----------------------------------------------

def _family(answer, constraints, params=None):
    doc = {"schema": 1, "families": [{"id": 1, "prompt": "", "answer": answer,
                                      "constraints": constraints}]}
    if params:
        doc["families"][0]["params"] = params
    return spec_from_dict(doc).families[0]


MASS = {"kind": "integral_matches", "integrand": "6*x + 6*y", "region": {"triangle": ["g2", "g3"]}}


def test_mass_formula_admissible():
    rep = check_family(_family("g2*g3*(g2 + g3)", [MASS]))
    assert rep.admissible and rep.points_checked == 81


def test_coefficient_five_is_not_admissible():
    fam = _family("g2*g3*(g2 + g3)", [dict(MASS, integrand="5*x + 5*y", equals="ans")])
    rep = check_family(fam)
    assert not rep.admissible
    assert "not an integer" in rep.violations[0]["failed"][0]["detail"]


@pytest.mark.parametrize("c, admissible", [(1, False), (2, False), (3, True), (4, False), (5, False), (6, True)])
def test_mass_coefficients(c, admissible):
    # the mass is c*g2*g3*(g2+g3)/6 and g2*g3*(g2+g3) is always even, so any
    # multiple of 3 works on the 1..9 grid
    fam = _family("g2*g3*(g2 + g3)", [dict(MASS, integrand=f"{c}*x + {c}*y", equals="ans*" + str(c),
                                           divisor=6)])
    rep = check_family(fam)
    assert rep.admissible
    integer = all(integral_oracle(f"{c}*x + {c}*y", MASS["region"], {"g2": a, "g3": b}).denominator == 1
                  for a in range(1, 10) for b in range(1, 10))
    assert integer is admissible


def test_violation_count_matches_brute_force():
    fam = _family("g1 + a1", [{"kind": "nonzero", "expr": "g1 - 2*a1"},
                              {"kind": "positive", "expr": "ans - 3"}])
    dom = DomainSpec.design()
    rep = check_family(fam, dom, max_listed=1000)
    brute = sum(1 for a1 in dom["a1"] for g1 in dom["g1"]
                if g1 - 2 * a1 == 0 or g1 + a1 - 3 <= 0)
    assert rep.total_violations == brute
    assert rep.points_checked == 90
    assert len(rep.violations) == brute


def test_domain_cap_refuses():
    fam = _family("a1*a2*a3*a4*b1*b2*b3*g1", [{"kind": "nonzero", "expr": "g1"}])
    with pytest.raises(DomainTooLarge):
        check_family(fam, cap=10**6)


def test_inconsistency_constraint_detects_wrong_key():
    matrix = [["-2*a1", "4*g2", "1", "1"], ["a1", "g2", "-2", "2"], ["-a1", "g2", "p + g3", "-p"]]
    good = _family("-g3 + 1", [{"kind": "system_inconsistent_at", "matrix": matrix}])
    bad = _family("-g3 + 2", [{"kind": "system_inconsistent_at", "matrix": matrix}])
    dom = DomainSpec.design().with_values(a1=range(1, 10))
    assert check_family(good, dom).admissible
    assert not check_family(bad, dom).admissible


def test_unknown_constraint_kind():
    with pytest.raises(ValueError, match="unknown constraint kind"):
        constraint_from_dict({"kind": "magic"})


def test_fixture_spec_is_admissible_on_design_domain(spec, roster):
    dom = DomainSpec.from_roster(roster)
    for fam in spec.families:
        assert check_family(fam, dom).admissible, fam.id


# -- unimodular construction ---------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_make_unimodular(seed):
    template = make_unimodular(3, seed=seed, inject="g2")
    texts = template_strings(template)
    assert any("g2" in t for row in texts for t in row)
    for g2 in range(1, 10):
        m = [[eval_expr(parse_expr(t), {"g2": g2}) for t in row] for row in texts]
        assert abs(leibniz_det(m)) == 1


def test_make_unimodular_with_fixed_ops():
    template = make_unimodular(2, ops=[("row_add", 0, 1, 2)])
    assert template_strings(template) == [["1", "2"], ["0", "1"]]
    with pytest.raises(ConstructionFailed):
        make_unimodular(2, ops=[("row_add", 0, 1, 1), ("row_add", 1, 0, 1)], inject="g1")
