"""Exhaustive well-posedness checks for question families."""
from .checker import AdmissibilityReport, DomainSpec, DomainTooLarge, check_family, check_spec
from .constraints import KINDS, Constraint, constraint_from_dict
from .exact import SingularMatrix, det_exact, inverse_entry_exact, inverse_exact, rank_exact
from .integrals import integral_numeric, integral_oracle, integral_poly, parse_region
from .poly import Poly, UnsupportedIntegral, poly_from_expr
from .unimodular import make_unimodular
