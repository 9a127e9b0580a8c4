"""Exhaustive admissibility checking of question families."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import prod

import numpy as np

from ..exprlang import PARAMS, eval_expr, free_params
from ..model import derive_params
from .constraints import PointCheck, PolyCheck
from .poly import Poly

DEFAULT_CAP = 10**7
MAX_LISTED = 100


class DomainTooLarge(ValueError):
    def __init__(self, family_id, size, cap):
        super().__init__(f"family {family_id}: domain has {size:,} points, above the cap of {cap:,}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class DomainSpec:
    """Finite value set per parameter."""

    values: dict

    def __post_init__(self):
        for p in PARAMS:
            vals = self.values.get(p)
            if not vals:
                raise ValueError(f"no domain for parameter {p}")
            if p.startswith("g") and 0 in vals:
                raise ValueError(f"domain of {p} must exclude 0")

    def __getitem__(self, p):
        return self.values[p]

    @classmethod
    def design(cls) -> "DomainSpec":
        vals = {p: tuple(range(1, 10)) if p.startswith("g") else tuple(range(10)) for p in PARAMS}
        return cls(vals)

    @classmethod
    def from_roster(cls, roster, observed_betas: bool = False) -> "DomainSpec":
        """α values as observed in the roster; β and γ over their full ranges
        unless ``observed_betas``."""
        vals = dict(cls.design().values)
        envs = [derive_params(s) for s in roster]
        if not envs:
            raise ValueError("empty roster")
        observed = ("a1", "a2", "a3", "a4") + (("b1", "b2", "b3") if observed_betas else ())
        for p in observed:
            vals[p] = tuple(sorted({e[p] for e in envs}))
        return cls(vals)

    def with_values(self, **overrides) -> "DomainSpec":
        return DomainSpec({**self.values, **{k: tuple(v) for k, v in overrides.items()}})


@dataclass
class AdmissibilityReport:
    family: int
    points_checked: int
    violations: list = field(default_factory=list)
    total_violations: int = 0

    @property
    def admissible(self) -> bool:
        return self.total_violations == 0

    def to_dict(self) -> dict:
        return {"family": self.family, "points_checked": self.points_checked,
                "admissible": self.admissible, "total_violations": self.total_violations,
                "violations": self.violations}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _grid_values(poly: Poly, names, domain):
    """Exact values of ``D * poly`` on the grid spanned by ``names`` (D > 0)."""
    d, coefs = poly.scaled_to_integers()
    axes = {}
    for k, n in enumerate(names):
        shape = [1] * len(names)
        shape[k] = -1
        axes[n] = np.asarray(domain[n]).reshape(shape)
    shape = tuple(len(domain[n]) for n in names)
    bound = sum(abs(c) * prod(max(abs(v) for v in domain[x]) ** abs(e) for x, e in m)
                for m, c in coefs.items())
    dtype = np.int64 if bound < 2**62 else object
    out = np.zeros(shape, dtype=dtype)
    for mono, c in coefs.items():
        term = np.full((1,) * len(names), c, dtype=dtype)
        for x, e in mono:
            term = term * axes[x].astype(dtype) ** e
        out = out + term
    return np.broadcast_to(out, shape)


def _violation_mask(check, names, domain, answer):
    shape = tuple(len(domain[n]) for n in names)
    if isinstance(check, PolyCheck):
        extra = check.poly.variables() - frozenset(names)
        if extra:
            raise ValueError(f"check {check.what!r} depends on unbound {sorted(extra)}")
        vals = _grid_values(check.poly, names, domain)
        if check.test == "zero":
            return vals != 0
        if check.test == "nonzero":
            return vals == 0
        return vals <= 0
    mask = np.zeros(shape, dtype=bool)
    for idx in itertools.product(*(range(s) for s in shape)):
        env = {n: domain[n][i] for n, i in zip(names, idx)}
        env["ans"] = eval_expr(answer, env)
        if check.fn(env) is not None:
            mask[idx] = True
    return mask


def check_family(family, domain: DomainSpec | None = None, cap: int = DEFAULT_CAP,
                 max_listed: int = MAX_LISTED) -> AdmissibilityReport:
    """Evaluate every constraint at every point of the family's domain product.

    Each constraint is evaluated on the sub-grid of the parameters it
    actually depends on and broadcast to the full product, so the reported
    counts refer to full parameter assignments.
    """
    domain = domain or DomainSpec.design()
    names = sorted(family.involved_params())
    size = prod(len(domain[n]) for n in names)
    if size > cap:
        raise DomainTooLarge(family.id, size, cap)
    report = AdmissibilityReport(family.id, size)
    if not family.constraints:
        return report
    full_shape = tuple(len(domain[n]) for n in names)
    union = np.zeros(full_shape, dtype=bool)
    per_constraint = []
    for c in family.constraints:
        rel = c.params()
        if c.uses_answer():
            rel |= free_params(family.answer) & frozenset(PARAMS)
        rel = sorted(rel)
        mask = np.zeros(tuple(len(domain[n]) for n in rel), dtype=bool)
        for check in c.checks(family.answer):
            mask |= _violation_mask(check, rel, domain, family.answer)
        # both orders are sorted, so a reshape lifts the sub-grid onto the full grid
        lifted = mask.reshape([len(domain[n]) if n in rel else 1 for n in names])
        full = np.broadcast_to(lifted, full_shape)
        per_constraint.append((c, full))
        union |= full
    report.total_violations = int(np.count_nonzero(union))
    if report.total_violations:
        flat = np.flatnonzero(union)[:max_listed]
        for f in flat:
            idx = np.unravel_index(f, full_shape)
            env = {n: int(domain[n][i]) for n, i in zip(names, idx)}
            ans_env = dict(env)
            try:
                ans_env["ans"] = eval_expr(family.answer, env)
            except Exception:  # answer itself may be undefined for a malformed family
                pass
            failed = []
            for c, full in per_constraint:
                if full[idx]:
                    try:
                        detail = c.detail(ans_env)
                    except Exception as exc:
                        detail = f"{type(exc).__name__}: {exc}"
                    failed.append({"kind": c.kind, "detail": detail})
            report.violations.append({"env": env, "failed": failed})
    return report


def check_spec(spec, domain=None, cap=DEFAULT_CAP) -> list:
    return [check_family(f, domain, cap) for f in spec.families]

