"""Place an exam spec on a cell grid."""
from __future__ import annotations

import math

from ..exprlang import Lit, Param, PARAMS, to_spreadsheet
from .cells import CellAddress, addr, col_index
from .model import CellMap, QuestionSlot, WorkbookModel
from .xlsx import legacy_password_hash

TEXT_COL = 4  # prompts start in column D
CHARS_PER_COL = 3.0  # rough glyph capacity of a width-2 column
FIRST_HEADING_ROW = 4

_GROUP_LABELS = {"a": "Year of entry:", "b": "Last three digits of student ID:", "g": "Examination code:"}
_SYMBOL = {"a": "α", "b": "β", "g": "γ"}


class LayoutError(ValueError):
    pass


def _text_cols(text: str) -> int:
    return max(1, math.ceil(len(text) / CHARS_PER_COL))


def _slot_span(e) -> int:
    return 1 if isinstance(e, (Param, Lit)) else 2


def _place_form(model: WorkbookModel, cm: CellMap) -> int:
    """Name and parameter rows; returns the last row used."""
    name = addr(cm.name)
    last_col = col_index(cm.last_page_col)
    if name.col > 2:
        model.set(CellAddress(name.row, 2), "Name:", bold=True)
    model.set(name, None, locked=False, border=True)
    if name.col < last_col:
        model.merge(name, CellAddress(name.row, last_col))
    model.name_cell = str(name)
    last = name.row
    for group in ("a", "b", "g"):
        cells = [(p, cm.param_addr(p)) for p in PARAMS if p[0] == group]
        first = min(a for _, a in cells)
        if first.col > 2:
            model.set(CellAddress(first.row, 2), _GROUP_LABELS[group], bold=True)
        for p, a in cells:
            if a.row > 1:
                model.set(a.offset(rows=-1), f"{_SYMBOL[group]}{p[1]}", align="center")
            model.set(a, None, locked=False, border=True, align="center")
            model.param_cells[p] = str(a)
            last = max(last, a.row)
    return last


def _place_question(model, fam, start, cm, refs) -> QuestionSlot:
    model.set(CellAddress(start, 2), f"{fam.id}.", bold=True)
    model.merge(CellAddress(start, 2), CellAddress(start, 3))
    for k, line in enumerate(fam.prompt.lines()):
        row = start + k
        col = TEXT_COL
        for seg in line:
            if isinstance(seg, str):
                model.set(CellAddress(row, col), seg)
                col += _text_cols(seg)
            else:
                span = _slot_span(seg)
                model.set(CellAddress(row, col), None, formula=to_spreadsheet(seg, refs), align="center")
                if span > 1:
                    model.merge(CellAddress(row, col), CellAddress(row, col + span - 1))
                col += span
    answer_row = start + fam.layout_rows - 1
    model.set(CellAddress(answer_row, 2), "Answer:", bold=True)
    box = CellAddress(answer_row, col_index(cm.answer_col))
    model.set(box, None, locked=False, border=True, align="center")
    if cm.answer_span > 1:
        model.merge(box, box.offset(cols=cm.answer_span - 1))
    mark = CellAddress(answer_row, col_index(cm.marking_col))
    return QuestionSlot(fam.id, start, answer_row, str(box), str(mark))


def layout_exam(spec, cell_map: CellMap | None = None, password: str | None = None) -> WorkbookModel:
    """Lay out the student-facing paper.

    Every question block (number row through answer row) is kept on one
    page: a block that would straddle a horizontal page break is pushed to
    the first row after the break.
    """
    cm = cell_map or CellMap.from_dict(spec.cell_map)
    model = WorkbookModel(kind="paper")
    model.col_widths[cm.marking_col] = 3.0
    model.col_breaks = [col_index(cm.last_page_col)]
    pw = spec.password if password is None else password
    model.protection = True
    model.password_hash = legacy_password_hash(pw) if pw else ""

    form_top = min([addr(cm.name).row] + [cm.param_addr(p).row for p in PARAMS]) - 1
    if spec.title:
        model.set("B2", spec.title, bold=True)
    for k, line in enumerate(spec.heading):
        row = FIRST_HEADING_ROW + k
        if row >= form_top:
            raise LayoutError(f"heading has {len(spec.heading)} lines; the form starts at row {form_top + 1}")
        model.set(CellAddress(row, 2), line)
    form_end = _place_form(model, cm)

    refs = {p: str(cm.param_addr(p)) for p in PARAMS}
    if cm.first_question_row <= form_end:
        raise LayoutError("first question row overlaps the form")
    row = cm.first_question_row
    page = cm.page_rows
    for fam in spec.families:
        if fam.layout_rows > page:
            raise LayoutError(f"question {fam.id} needs {fam.layout_rows} rows; a page holds {page}")
        end = row + fam.layout_rows - 1
        brk = (row - 1) // page * page + page  # next break below `row`
        if end > brk:
            row = brk + 1
            end = row + fam.layout_rows - 1
        slot = _place_question(model, fam, row, cm, refs)
        model.questions.append(slot)
        row = end + 1 + cm.gap_rows

    last = max(model.max_row(), addr(cm.total).row if cm.total else 0)
    if model.questions and not cm.total:
        last = max(last, model.questions[-1].end_row + 1)
    model.row_breaks = list(range(page, last, page))
    return model


def build_marking_copy(model: WorkbookModel, spec, cell_map: CellMap | None = None) -> WorkbookModel:
    """The examiner's copy: marking formulas in the hidden marking column.

    With a uniform weight the marking cells give 1 or 0 and the total is
    ``SUM(...)*weight``; otherwise each cell carries its own weight.
    """
    cm = cell_map or CellMap.from_dict(spec.cell_map)
    out = model.copy()
    out.kind = "marking"
    out.protection = False
    refs = {p: model.param_cells[p] for p in PARAMS}
    weights = {f.weight for f in spec.families}
    uniform = len(weights) <= 1
    for slot, fam in zip(out.questions, spec.families):
        worth = 1 if uniform else fam.weight
        expr = to_spreadsheet(fam.answer, refs)
        out.set(slot.marking_cell, None, formula=f"IF({slot.answer_cell}={expr},{worth},0)",
                align="center")
    if out.questions:
        first, last = out.questions[0].marking_cell, out.questions[-1].marking_cell
        total = addr(cm.total) if cm.total else addr(last).offset(rows=1)
        rng = f"SUM({first}:{last})"
        formula = f"{rng}*{weights.pop()}" if uniform else rng
        out.set(total, None, formula=formula, bold=True, align="center")
        out.total_cell = str(total)
    return out


def fill_answers(model: WorkbookModel, env, answers: dict | None = None, name: str = "") -> WorkbookModel:
    """A copy of ``model`` with the form and answer boxes filled in."""
    out = model.copy()
    if name:
        out.get(out.name_cell).value = name
    for p, a in out.param_cells.items():
        out.get(a).value = int(env[p])
    for slot in out.questions:
        if answers and slot.id in answers and answers[slot.id] is not None:
            out.get(slot.answer_cell).value = answers[slot.id]
    return out
