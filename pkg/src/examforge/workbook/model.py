"""Format-independent workbook model and the cell map."""
from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..exprlang import PARAMS
from .cells import CellAddress, addr, col_index

DEFAULT_PARAM_CELLS = {
    "a1": "M16", "a2": "N16", "a3": "O16", "a4": "P16",
    "b1": "N18", "b2": "O18", "b3": "P18",
    "g1": "J20", "g2": "K20", "g3": "L20",
}


@dataclass(frozen=True)
class CellMap:
    """Where inputs, answers and marks live on the sheet."""

    params: dict = field(default_factory=lambda: dict(DEFAULT_PARAM_CELLS))
    name: str = "J14"
    first_question_row: int = 23
    answer_col: str = "G"
    answer_span: int = 5  # columns merged into one answer box
    marking_col: str = "AG"
    total: str | None = None  # default: the row below the last answer
    last_page_col: str = "AF"  # vertical page break sits after this column
    page_rows: int = 50
    gap_rows: int = 1

    def __post_init__(self):
        missing = set(PARAMS) - set(self.params)
        if missing:
            raise ValueError(f"cell map lacks parameter cells for {sorted(missing)}")
        cells = [addr(a) for a in self.params.values()] + [addr(self.name)]
        if len(set(cells)) != len(cells):
            raise ValueError("cell map addresses must be distinct")
        if col_index(self.marking_col) <= col_index(self.last_page_col):
            raise ValueError("marking column must lie right of the vertical page break")
        if col_index(self.answer_col) + self.answer_span - 1 > col_index(self.last_page_col):
            raise ValueError("answer boxes must lie left of the vertical page break")
        if self.page_rows < 2 or self.gap_rows < 0:
            raise ValueError("page_rows must be >= 2 and gap_rows >= 0")

    def param_addr(self, p: str) -> CellAddress:
        return addr(self.params[p])

    @classmethod
    def from_dict(cls, d: dict | None) -> "CellMap":
        d = dict(d or {})
        params = dict(DEFAULT_PARAM_CELLS)
        params.update(d.pop("params", {}))
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown cell map keys {sorted(unknown)}")
        return cls(params=params, **d)

    @classmethod
    def load(cls, path) -> "CellMap":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class Cell:
    value: object = None  # str | int | None
    formula: str | None = None  # without the leading "="
    locked: bool = True
    hidden: bool = True
    bold: bool = False
    align: str | None = None  # "left" | "center" | "right"
    border: bool = False

    def content(self):
        """What a user sees in the formula bar: ``"=..."`` or the literal."""
        if self.formula is not None:
            return "=" + self.formula
        return self.value


@dataclass
class QuestionSlot:
    id: int
    start_row: int
    end_row: int
    answer_cell: str
    marking_cell: str


@dataclass
class WorkbookModel:
    kind: str = "paper"  # "paper" | "marking"
    sheet_name: str = "Exam"
    cells: dict = field(default_factory=dict)  # CellAddress -> Cell
    merges: list = field(default_factory=list)  # "B23:C23"
    default_width: float = 2.0
    col_widths: dict = field(default_factory=dict)  # letters -> width
    row_breaks: list = field(default_factory=list)  # break after these rows
    col_breaks: list = field(default_factory=list)  # break after these column indices
    gridlines: bool = False
    font: str = "Times New Roman"
    font_size: int = 11
    vertical_align: str = "center"
    protection: bool = True
    password_hash: str = ""
    name_cell: str = ""
    param_cells: dict = field(default_factory=dict)
    questions: list = field(default_factory=list)  # QuestionSlot
    total_cell: str | None = None

    def set(self, a, value=None, formula=None, **fmt) -> Cell:
        a = addr(a)
        cell = Cell(value=value, formula=formula, **fmt)
        self.cells[a] = cell
        return cell

    def get(self, a) -> Cell | None:
        return self.cells.get(addr(a))

    def merge(self, first, last) -> None:
        self.merges.append(f"{addr(first)}:{addr(last)}")

    def unlocked(self) -> set:
        return {str(a) for a, c in self.cells.items() if not c.locked}

    def input_cells(self) -> set:
        return {self.name_cell, *self.param_cells.values(), *(q.answer_cell for q in self.questions)}

    def copy(self) -> "WorkbookModel":
        return copy.deepcopy(self)

    def max_row(self) -> int:
        return max((a.row for a in self.cells), default=1)

    def max_col(self) -> int:
        return max((a.col for a in self.cells), default=1)

    def to_dict(self) -> dict:
        cells = []
        for a in sorted(self.cells):
            c = self.cells[a]
            if c.value is None and c.formula is None and not c.border and c.locked:
                continue
            entry = {"cell": str(a), "locked": c.locked, "hidden": c.hidden}
            if c.formula is not None:
                entry["formula"] = "=" + c.formula
            elif c.value is not None:
                entry["value"] = c.value
            if c.bold:
                entry["bold"] = True
            if c.align:
                entry["align"] = c.align
            if c.border:
                entry["border"] = True
            cells.append(entry)
        return {
            "kind": self.kind,
            "sheet": self.sheet_name,
            "font": f"{self.font} {self.font_size}",
            "vertical_align": self.vertical_align,
            "gridlines": self.gridlines,
            "default_width": self.default_width,
            "col_widths": dict(sorted(self.col_widths.items(), key=lambda kv: col_index(kv[0]))),
            "merges": sorted(self.merges, key=lambda r: (addr(r.split(":")[0]), r)),
            "row_breaks": sorted(self.row_breaks),
            "col_breaks": sorted(self.col_breaks),
            "protection": {"enabled": self.protection, "password_hash": self.password_hash},
            "name_cell": self.name_cell,
            "param_cells": dict(sorted(self.param_cells.items())),
            "questions": [asdict(q) for q in self.questions],
            "total_cell": self.total_cell,
            "cells": cells,
        }
