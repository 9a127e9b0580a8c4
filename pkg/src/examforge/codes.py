"""Examination codes and collusion-group distinctness.

Codes are three digits in 1..9, drawn like ``RANDBETWEEN(1,9)`` per digit and
resampled until unique.  Two type schemes are supported:

* bucket schemes, where question *k* shows one of a few printed variants
  selected by the bucket of digit *k* of the code (A/B/C or two-way);
* the parameterised scheme, where a question's type is the tuple of values
  of the parameters it involves.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace

from .model import StudentRecord, derive_params

ALL_CODES = tuple("".join(d) for d in itertools.product("123456789", repeat=3))


class InfeasibleGroup(ValueError):
    def __init__(self, message, group=None, question=None):
        super().__init__(message)
        self.group = group
        self.question = question


def generate_codes(n: int, seed=None) -> list:
    if not 0 <= n <= len(ALL_CODES):
        raise ValueError(f"cannot draw {n} distinct codes: only {len(ALL_CODES)} exist")
    rng = random.Random(seed)
    seen = set()
    out = []
    while len(out) < n:
        code = "".join(str(rng.randint(1, 9)) for _ in range(3))
        if code not in seen:
            seen.add(code)
            out.append(code)
    return out


@dataclass(frozen=True)
class BucketScheme:
    """Per code position, a labelling of the digits 1..9."""

    positions: tuple  # three dicts digit -> label

    def __post_init__(self):
        for mapping in self.positions:
            if sorted(mapping) != list(range(1, 10)):
                raise ValueError("each position must label every digit 1..9 exactly once")

    @classmethod
    def from_buckets(cls, buckets: dict, positions: int = 3) -> "BucketScheme":
        """``buckets`` maps label -> digits, e.g. ``{"A": (1, 2, 3), ...}``."""
        mapping = {}
        for label, digits in buckets.items():
            for d in digits:
                if d in mapping:
                    raise ValueError(f"digit {d} is in two buckets")
                mapping[d] = label
        return cls(tuple(dict(mapping) for _ in range(positions)))

    @classmethod
    def three_way(cls) -> "BucketScheme":
        return cls.from_buckets({"A": (1, 2, 3), "B": (4, 5, 6), "C": (7, 8, 9)})

    @classmethod
    def two_way(cls, split: int = 4) -> "BucketScheme":
        """Digits 1..split give A, the rest B."""
        if not 1 <= split <= 8:
            raise ValueError("split must leave both buckets non-empty")
        return cls.from_buckets({"A": range(1, split + 1), "B": range(split + 1, 10)})

    def labels(self, position: int) -> set:
        return set(self.positions[position - 1].values())


def bucket_type(code, position: int, scheme: BucketScheme) -> str:
    if position not in (1, 2, 3):
        raise ValueError(f"position must be 1, 2 or 3, got {position}")
    digit = int(str(code)[position - 1])
    return scheme.positions[position - 1][digit]


def _question_params(q) -> frozenset:
    if hasattr(q, "involved_params"):
        return q.involved_params()
    return frozenset(q)


def question_type(student: StudentRecord, question, scheme: BucketScheme | None):
    """The variant of ``question`` that ``student`` receives.

    Under a bucket scheme ``question`` is a code position; otherwise it is a
    set of parameter names (or anything with ``involved_params()``).
    """
    if scheme is not None:
        return bucket_type(student.code, question, scheme)
    env = derive_params(student)
    return tuple(env[p] for p in sorted(_question_params(question)))


def find_collisions(roster, groups, questions, scheme=None) -> list:
    """All (group index, name, name, question) with equal types inside a group."""
    by_name = {s.name: s for s in roster}
    out = []
    for gi, group in enumerate(groups):
        members = [by_name[n] for n in group]
        for a, b in itertools.combinations(members, 2):
            for q in questions:
                if question_type(a, q, scheme) == question_type(b, q, scheme):
                    out.append((gi, a.name, b.name, q))
    return out


def _precheck(roster_by_name, groups, questions, scheme):
    for gi, group in enumerate(groups):
        if len(group) < 2:
            raise ValueError(f"group {gi} has fewer than two members")
        for q in questions:
            if scheme is not None:
                reachable = len(scheme.labels(q))
                if reachable < len(group):
                    raise InfeasibleGroup(
                        f"group {gi} ({', '.join(group)}) has {len(group)} members but question "
                        f"{q} has only {reachable} types", gi, q)
                continue
            params = sorted(_question_params(q))
            varying = [p for p in params if p.startswith("g")]
            fixed_classes = {}
            for name in group:
                env = derive_params(roster_by_name[name])
                key = tuple(env[p] for p in params if not p.startswith("g"))
                fixed_classes.setdefault(key, []).append(name)
            for key, names in fixed_classes.items():
                if len(names) > 9 ** len(varying):
                    raise InfeasibleGroup(
                        f"group {gi}: {', '.join(names)} share identity parameters for a question "
                        f"involving {params}; at most {9 ** len(varying)} distinct types exist", gi, q)


def enforce_distinctness(roster, groups, questions, scheme: BucketScheme | None = None,
                         seed=0, max_nodes: int = 200_000) -> list:
    """Edit the codes of group members so every pair differs on every question.

    Codes of students outside all groups are never touched, identity digits
    (year, ID) are never touched, and all codes stay distinct.  Candidate
    codes are tried in order of Hamming distance from the current code, so
    members are left alone wherever the constraints allow.
    """
    roster = list(roster)
    by_name = {s.name: s for s in roster}
    groups = [list(g) for g in groups]
    questions = list(questions)
    for g in groups:
        for name in g:
            if name not in by_name:
                raise KeyError(f"group member {name!r} is not on the roster")
    _precheck(by_name, groups, questions, scheme)

    order = []
    for g in groups:
        for name in g:
            if name not in order:
                order.append(name)
    partners = {name: set() for name in order}
    for g in groups:
        for a, b in itertools.permutations(g, 2):
            partners[a].add(b)
    fixed_codes = {s.code for s in roster if s.name not in partners}

    rng = random.Random(seed)

    def candidates(student):
        noise = {c: rng.random() for c in ALL_CODES}
        dist = lambda c: sum(x != y for x, y in zip(c, student.code))
        return sorted(ALL_CODES, key=lambda c: (dist(c), noise[c]))

    cand = {name: candidates(by_name[name]) for name in order}
    assigned = {}
    used = set(fixed_codes)
    nodes = 0

    def consistent(name, record):
        for other in partners[name]:
            if other in assigned:
                o = assigned[other]
                for q in questions:
                    if question_type(record, q, scheme) == question_type(o, q, scheme):
                        return False
        return True

    def solve(k):
        nonlocal nodes
        if k == len(order):
            return True
        name = order[k]
        base = by_name[name]
        for code in cand[name]:
            if code in used:
                continue
            nodes += 1
            if nodes > max_nodes:
                raise InfeasibleGroup(f"search budget exhausted while placing {name!r}")
            record = replace(base, code=code)
            if not consistent(name, record):
                continue
            assigned[name] = record
            used.add(code)
            if solve(k + 1):
                return True
            del assigned[name]
            used.discard(code)
        return False

    if not solve(0):
        raise InfeasibleGroup("no code assignment separates every group")
    return [assigned.get(s.name, s) for s in roster]
