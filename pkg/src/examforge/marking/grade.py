"""Grade a submission against the answer key."""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from ..exprlang import PARAMS, eval_expr
from ..model import derive_params

FLAGS = ("UNPROTECTED", "LOCKED_CELL_EDITED", "PARAM_MISMATCH", "NON_INTEGER_ANSWER", "MISSING_CELL")
PARAM_SOURCES = ("roster", "submission")


class StudentNotFound(LookupError):
    pass


@dataclass
class MarkSheet:
    code: str
    name: str
    marks: dict  # question id -> 0 | 1
    total: int
    flags: tuple = ()
    source: str = ""
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"code": self.code, "name": self.name, "source": self.source,
                "marks": {str(k): v for k, v in self.marks.items()}, "total": self.total,
                "flags": list(self.flags), "notes": list(self.notes)}


def parse_integer(v):
    """The integer a typed value denotes, or None.

    Numbers with a zero fractional part count (``7.0``); text is parsed the
    same way after trimming.  Booleans and anything else are rejected.
    """
    if isinstance(v, bool) or v is None:
        return None
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return int(v) if v.is_integer() else None
    if isinstance(v, str):
        s = v.strip().replace("−", "-")
        try:
            d = Decimal(s)
        except InvalidOperation:
            return None
        if not d.is_finite() or d != d.to_integral_value():
            return None
        return int(d)
    return None


def _blank(v) -> bool:
    return v is None or (isinstance(v, str) and not v.strip())


def identify(sub, roster):
    """Issued code first, then the typed name, then the typed γ code."""
    by_code = {s.code: s for s in roster}
    if sub.issued_code and sub.issued_code in by_code:
        return by_code[sub.issued_code]
    if isinstance(sub.name, str) and sub.name.strip():
        key = " ".join(sub.name.split()).casefold()
        hits = [s for s in roster if " ".join(s.name.split()).casefold() == key]
        if len(hits) == 1:
            return hits[0]
    typed = [parse_integer(sub.params.get(p)) for p in ("g1", "g2", "g3")]
    if all(t is not None and 1 <= t <= 9 for t in typed):
        code = "".join(map(str, typed))
        if code in by_code:
            return by_code[code]
    raise StudentNotFound(f"{sub.source}: student not found in roster")


def grade(sub, spec, roster, param_source: str = "roster") -> MarkSheet:
    if param_source not in PARAM_SOURCES:
        raise ValueError(f"param_source must be one of {PARAM_SOURCES}")
    student = identify(sub, roster)
    official = derive_params(student)
    flags = set()
    notes = []
    if not sub.protected:
        flags.add("UNPROTECTED")
    if sub.locked_cell_diff:
        flags.add("LOCKED_CELL_EDITED")
        notes.append("edited cells: " + ", ".join(d["cell"] for d in sub.locked_cell_diff))
    if _blank(sub.name):
        flags.add("MISSING_CELL")
        notes.append("name cell blank")
    env = dict(official)
    for p in PARAMS:
        raw = sub.params.get(p)
        if _blank(raw):
            flags.add("MISSING_CELL")
            notes.append(f"{p} blank")
            continue
        v = parse_integer(raw)
        if v != official[p]:
            flags.add("PARAM_MISMATCH")
            notes.append(f"{p} typed {raw!r}, roster {official[p]}")
            if param_source == "submission" and v is not None:
                env[p] = v
    marks = {}
    total = 0
    for fam in spec.families:
        raw = sub.answers.get(fam.id)
        mark = 0
        if not _blank(raw):
            v = parse_integer(raw)
            if v is None:
                flags.add("NON_INTEGER_ANSWER")
                notes.append(f"q{fam.id} answer {raw!r} is not an integer")
            else:
                try:
                    mark = int(v == eval_expr(fam.answer, env))
                except ArithmeticError:
                    mark = 0
        marks[fam.id] = mark
        total += mark * fam.weight
    name = student.name
    return MarkSheet(code=student.code, name=name, marks=marks, total=total,
                     flags=tuple(f for f in FLAGS if f in flags), source=sub.source, notes=notes)
