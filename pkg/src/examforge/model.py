"""Roster, per-student parameters and the examination specification."""
from __future__ import annotations

import csv
import json
import random
from collections.abc import Mapping
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .exprlang import (
    PARAMS,
    ExprError,
    PromptTemplate,
    free_params,
    parse_expr,
    parse_template,
)

SCHEMA_VERSION = 1


class SpecError(ValueError):
    """Invalid exam spec or roster; the message names the offending item."""


@dataclass(frozen=True)
class StudentRecord:
    name: str
    year: str  # four digits of the year of entry
    id_tail: str  # third-to-last, second-to-last and last digit of the ID
    code: str  # examination code, three digits in 1..9

    def __post_init__(self):
        for label, value, n in (("year", self.year, 4), ("id_tail", self.id_tail, 3),
                                ("code", self.code, 3)):
            if not (isinstance(value, str) and len(value) == n and value.isdigit()
                    and value.isascii()):
                raise SpecError(f"student {self.name!r}: {label} must be {n} decimal digits, got {value!r}")
        if "0" in self.code:
            raise SpecError(f"student {self.name!r}: examination code {self.code} contains 0")


@dataclass(frozen=True)
class ParamEnv(Mapping):
    """The ten randomisation digits of one student.

    Behaves as a read-only mapping ``{"a1": ..., "g3": ...}`` so it can be
    passed straight to :func:`examforge.exprlang.eval_expr`.
    """

    a1: int
    a2: int
    a3: int
    a4: int
    b1: int
    b2: int
    b3: int
    g1: int
    g2: int
    g3: int

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            lo = 1 if f.name.startswith("g") else 0
            if not (isinstance(v, int) and lo <= v <= 9):
                raise SpecError(f"parameter {f.name} must be a digit in {lo}..9, got {v!r}")

    def __getitem__(self, key):
        if key not in PARAMS:
            raise KeyError(key)
        return getattr(self, key)

    def __iter__(self):
        return iter(PARAMS)

    def __len__(self):
        return len(PARAMS)

    @property
    def code(self) -> str:
        return f"{self.g1}{self.g2}{self.g3}"


def derive_params(s: StudentRecord) -> ParamEnv:
    digits = [int(c) for c in s.year + s.id_tail + s.code]
    return ParamEnv(*digits)


# -- exam specification ------------------------------------------------------

@dataclass(frozen=True)
class QuestionFamily:
    id: int
    prompt: PromptTemplate
    answer: object  # exprlang.Expr
    constraints: tuple = ()
    weight: int = 5
    layout_rows: int = 4
    params: frozenset = frozenset()
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def involved_params(self) -> frozenset:
        """Parameters appearing in the prompt, the answer or any constraint."""
        out = self.prompt.free_params() | free_params(self.answer)
        for c in self.constraints:
            out |= c.params()
        return out & frozenset(PARAMS)


@dataclass(frozen=True)
class ExamSpec:
    title: str
    heading: tuple
    families: tuple
    password: str = ""
    weight: int = 5
    cell_map: dict = field(default_factory=dict)

    def truncated(self, k: int) -> "ExamSpec":
        if not 1 <= k <= len(self.families):
            raise SpecError(f"cannot keep {k} of {len(self.families)} questions")
        return replace(self, families=self.families[:k])

    def family(self, fid: int) -> QuestionFamily:
        return self.families[fid - 1]


def _family_from_dict(d: dict, default_weight: int) -> QuestionFamily:
    # imported lazily: constraints depend on model types only through duck typing
    from .admissibility.constraints import constraint_from_dict

    fid = d.get("id")
    where = f"family {fid}"
    try:
        prompt = parse_template(d["prompt"])
        answer = parse_expr(str(d["answer"]))
        constraints = tuple(constraint_from_dict(c) for c in d.get("constraints", ()))
    except KeyError as exc:
        raise SpecError(f"{where}: missing field {exc.args[0]!r}") from None
    except (ExprError, ValueError) as exc:
        raise SpecError(f"{where}: {exc}") from None
    weight = int(d.get("weight", default_weight))
    layout_rows = int(d.get("layout_rows", len(prompt.lines()) + 3))
    if weight <= 0 or layout_rows <= 0:
        raise SpecError(f"{where}: weight and layout_rows must be positive")
    if layout_rows < len(prompt.lines()) + 2:
        raise SpecError(f"{where}: layout_rows={layout_rows} cannot hold "
                        f"{len(prompt.lines())} prompt lines plus number and answer rows")
    fam = QuestionFamily(id=fid, prompt=prompt, answer=answer, constraints=constraints,
                         weight=weight, layout_rows=layout_rows, source=d)
    used = fam.involved_params()
    if "params" in d:
        declared = frozenset(d["params"])
        unknown = declared - frozenset(PARAMS)
        if unknown:
            raise SpecError(f"{where}: unknown declared parameters {sorted(unknown)}")
        undeclared = used - declared
        if undeclared:
            raise SpecError(f"{where}: references undeclared parameters {sorted(undeclared)}")
    else:
        declared = used
    return replace(fam, params=declared)


def spec_from_dict(doc: dict) -> ExamSpec:
    if doc.get("schema") != SCHEMA_VERSION:
        raise SpecError(f"unsupported exam spec schema {doc.get('schema')!r} (expected {SCHEMA_VERSION})")
    weight = int(doc.get("weight", 5))
    fams = []
    for i, d in enumerate(doc.get("families", ()), 1):
        if d.get("id") != i:
            raise SpecError(f"family ids must be contiguous from 1: position {i} has id {d.get('id')!r}")
        fams.append(_family_from_dict(d, weight))
    heading = doc.get("heading", ())
    if isinstance(heading, str):
        heading = heading.split("\n")
    return ExamSpec(title=doc.get("title", ""), heading=tuple(heading), families=tuple(fams),
                    password=doc.get("password", ""), weight=weight,
                    cell_map=dict(doc.get("cell_map", {})))


def load_spec(path) -> ExamSpec:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return spec_from_dict(doc)


# -- roster ------------------------------------------------------------------

ROSTER_COLUMNS = ("name", "year", "id_tail", "code")


def validate_roster(students) -> list:
    seen = {}
    for s in students:
        if s.code in seen:
            raise SpecError(f"duplicate examination code {s.code}: {seen[s.code]!r} and {s.name!r}")
        seen[s.code] = s.name
    return list(students)


def _record(row: Mapping, where: str) -> StudentRecord:
    try:
        return StudentRecord(name=str(row["name"]).strip(), year=str(row["year"]).strip(),
                             id_tail=str(row["id_tail"]).strip(), code=str(row["code"]).strip())
    except KeyError as exc:
        raise SpecError(f"{where}: missing column {exc.args[0]!r}") from None
    except SpecError as exc:
        raise SpecError(f"{where}: {exc}") from None


def load_roster(path) -> list:
    """Load a roster from ``.csv`` (header name,year,id_tail,code) or ``.json``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        rows = doc["students"] if isinstance(doc, dict) else doc
        return validate_roster([_record(r, f"{path}: student {i}") for i, r in enumerate(rows, 1)])
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(ROSTER_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise SpecError(f"{path}: missing columns {sorted(missing)}")
        return validate_roster([_record(r, f"{path}:{reader.line_num}") for r in reader])


def write_roster(students, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(ROSTER_COLUMNS)
        for s in students:
            w.writerow([s.name, s.year, s.id_tail, s.code])


def synthetic_roster(n: int = 81, seed: int = 0, repeaters: int = 11) -> list:
    """A cohort shaped like a single intake plus a few repeat-takers.

    Most students enter in 2020; ``repeaters`` of them get earlier years
    (2019, 2018, 2017, 2010) so the year digits vary the way a real
    second-year module roster does.  Codes are distinct draws from 111..999.
    """
    from .codes import generate_codes

    rng = random.Random(seed)
    codes = generate_codes(n, seed)
    old_years = ["2019", "2018", "2017", "2010"]
    students = []
    for i in range(n):
        if i < repeaters:
            year = old_years[i % len(old_years)]
        else:
            year = "2020"
        id_tail = f"{rng.randint(0, 1)}{rng.randint(1, 9)}{rng.randint(0, 9)}"
        students.append(StudentRecord(f"Student {i + 1:03d}", year, id_tail, codes[i]))
    rng.shuffle(students)
    return students
