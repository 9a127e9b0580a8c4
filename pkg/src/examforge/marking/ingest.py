"""Read a submitted workbook and compare it with the canonical paper."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..workbook.cells import addr
from .formula import FormulaError, evaluate, parse_formula

_CODE_STEM = re.compile(r"^[1-9]{3}$")


class SubmissionError(ValueError):
    pass


@dataclass
class Submission:
    source: str
    issued_code: str | None  # from the file name, when it is a 3-digit code
    name: object
    params: dict  # parameter -> typed value (None when blank)
    answers: dict  # question id -> typed value (None when blank)
    protected: bool
    locked_cell_diff: list = field(default_factory=list)  # {"cell", "expected", "found"}


def _raw(v):
    """openpyxl cell value to plain text/number, formulas as ``"=..."``."""
    if v is None:
        return None
    text = getattr(v, "text", None)  # array formulas
    if text is not None:
        return "=" + str(text).lstrip("=")
    return v


def _norm(v):
    if v is None or v == "":
        return None
    if isinstance(v, str) and v.startswith("="):
        return "=" + re.sub(r"\s+", "", v[1:]).upper().replace(";", ",").replace("$", "")
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def _input_value(raw, sheet_get):
    if isinstance(raw, str) and raw.startswith("="):
        # a formula typed into an input cell: use its value
        try:
            return evaluate(parse_formula(raw), sheet_get)
        except (FormulaError, RecursionError) as exc:
            return f"#ERROR: {exc}"
    return raw


def ingest_submission(path, canonical) -> Submission:
    """Extract typed inputs and diff every locked cell against ``canonical``.

    ``canonical`` is the paper model the file was generated from; it also
    supplies the input-cell addresses.
    """
    from openpyxl import load_workbook

    path = Path(path)
    try:
        wb = load_workbook(path)
    except Exception as exc:  # openpyxl raises a zoo of types for bad input
        raise SubmissionError(f"{path.name}: unreadable workbook ({type(exc).__name__}: {exc})") from None
    if not wb.worksheets:
        raise SubmissionError(f"{path.name}: no worksheet")
    ws = wb.worksheets[0]
    found = {}
    for row in ws.iter_rows():
        for c in row:
            v = _raw(c.value)
            if v is not None and v != "":
                found[addr(c.coordinate)] = v

    def sheet_get(a):
        v = found.get(a)
        if isinstance(v, str) and v.startswith("="):
            return evaluate(parse_formula(v), sheet_get)
        return v

    inputs = {addr(a) for a in canonical.input_cells()}
    diff = []
    for a in sorted(set(found) | {a for a, c in canonical.cells.items() if c.content() is not None}):
        if a in inputs:
            continue
        cell = canonical.cells.get(a)
        expected = cell.content() if cell else None
        if _norm(expected) != _norm(found.get(a)):
            diff.append({"cell": str(a), "expected": expected, "found": found.get(a)})

    def typed(a):
        return _input_value(found.get(addr(a)), sheet_get)

    stem = path.stem
    return Submission(
        source=path.name,
        issued_code=stem if _CODE_STEM.match(stem) else None,
        name=typed(canonical.name_cell),
        params={p: typed(a) for p, a in canonical.param_cells.items()},
        answers={q.id: typed(q.answer_cell) for q in canonical.questions},
        protected=bool(ws.protection.sheet),
        locked_cell_diff=diff,
    )
