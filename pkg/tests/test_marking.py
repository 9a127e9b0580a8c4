import csv
import functools
import json
import tempfile
from pathlib import Path

import openpyxl
import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES
from helpers import answer_key, envs, exprs, write_paper

from examforge.exprlang import ExprOverflow, eval_expr, to_spreadsheet
from examforge.marking import (
    FormulaError, StudentNotFound, SubmissionError, batch_mark, eval_formula, grade,
    ingest_submission, parse_integer,
)
from examforge.model import StudentRecord, derive_params, load_spec, synthetic_roster
from examforge.workbook import DEFAULT_PARAM_CELLS, layout_exam


@pytest.fixture(scope="module")
def paper(spec):
    return layout_exam(spec)


@functools.lru_cache(maxsize=None)
def _context():
    """(spec, roster, paper) for hypothesis tests, which should not take fixtures."""
    spec = load_spec(FIXTURES / "exam20.json")
    return spec, synthetic_roster(81, seed=7), layout_exam(spec)


# -- formula interpreter -----------------------------------------------------------

@pytest.mark.parametrize("src, value", [
    ("=-2^2", 4),
    ("=-(2^2)", -4),
    ("=2+3*4", 14),
    ("=2^3^2", 64),  # left-associative in spreadsheets
    ("=IF(1=1,1,0)", 1),
    ("=IF(A1=0;1;0)", 1),  # blank equals 0, semicolon separators
    ('=IF(A1="",1,0)', 1),
    ("=SUM(B1:B3)*5", 60),
    ("=AND(TRUE,NOT(FALSE))", True),
    ("=OR(1>2,ABS(-3)=3)", True),
    ("=B1&B2", "15"),
    ("=10/4", 2.5),
    ("=50%", 0.5),
])
def test_formula_values(src, value):
    assert eval_formula(src, {"B1": 1, "B2": 5, "B3": "=B1+B2-6+6"}) == value


@pytest.mark.parametrize("src", ["=1/0", "=FOO(1)", "=(1+2", '="a"+1', "=A1:A2", "=A1"])
def test_formula_errors(src):
    with pytest.raises(FormulaError):
        eval_formula(src, {"A1": "=A1"})


@given(exprs(), envs)
def test_compiled_expression_evaluates_like_the_source(e, env):
    try:
        expected = eval_expr(e, env)
    except ExprOverflow:
        return
    cells = {DEFAULT_PARAM_CELLS[p]: v for p, v in env.items()}
    assert eval_formula("=" + to_spreadsheet(e, DEFAULT_PARAM_CELLS), cells) == expected


# -- integer parsing -------------------------------------------------------------

@pytest.mark.parametrize("raw, value", [
    (7, 7), (7.0, 7), ("7", 7), (" -12 ", -12), ("7.0", 7), ("−3", -3), ("1e2", 100),
    (7.01, None), ("7.01", None), ("seven", None), (True, None), (None, None), ("nan", None),
])
def test_parse_integer(raw, value):
    assert parse_integer(raw) == value


# -- ingest and grade ----------------------------------------------------------

def test_untouched_correct_paper(paper, spec, roster, tmp_path):
    s = roster[0]
    sub = ingest_submission(write_paper(paper, spec, s, tmp_path / f"{s.code}.xlsx"), paper)
    assert sub.protected and sub.locked_cell_diff == [] and sub.issued_code == s.code
    sheet = grade(sub, spec, roster)
    assert sheet.total == 100 and sheet.flags == ()


def test_worked_example(paper, spec, tmp_path):
    s = StudentRecord("Worked", "2020", "153", "487")
    answers = {f.id: None for f in spec.families}
    answers[1] = 192
    sub = ingest_submission(write_paper(paper, spec, s, tmp_path / "487.xlsx", answers), paper)
    sheet = grade(sub, spec, [s])
    assert sheet.marks[1] == 1 and sheet.total == 5


def test_blank_answers(paper, spec, roster, tmp_path):
    s = roster[1]
    path = write_paper(paper, spec, s, tmp_path / f"{s.code}.xlsx", answers={})
    sheet = grade(ingest_submission(path, paper), spec, roster)
    assert sheet.total == 0 and sheet.flags == ()


def test_empty_form_flags_missing_cells(paper, spec, roster, tmp_path):
    from examforge.workbook import emit_xlsx
    s = roster[2]
    sheet = grade(ingest_submission(emit_xlsx(paper, tmp_path / f"{s.code}.xlsx"), paper), spec, roster)
    assert sheet.total == 0 and sheet.flags == ("MISSING_CELL",)


def test_unprotected_and_edited(paper, spec, roster, tmp_path):
    s = roster[3]
    path = write_paper(paper, spec, s, tmp_path / f"{s.code}.xlsx")
    wb = openpyxl.load_workbook(path)
    ws = wb.active
    ws.protection.sheet = False
    ws["H24"] = "=5"
    wb.save(path)
    sub = ingest_submission(path, paper)
    assert [d["cell"] for d in sub.locked_cell_diff] == ["H24"]
    sheet = grade(sub, spec, roster)
    assert sheet.flags == ("UNPROTECTED", "LOCKED_CELL_EDITED") and sheet.total == 100


def test_decimal_and_text_answers(paper, spec, roster, tmp_path):
    s = roster[4]
    key = answer_key(spec, s)
    answers = dict(key)
    answers[1] = float(key[1])
    answers[2] = f"{key[2]}.0"
    answers[3] = key[3] + 0.01
    answers[4] = "no idea"
    path = write_paper(paper, spec, s, tmp_path / f"{s.code}.xlsx", answers)
    sheet = grade(ingest_submission(path, paper), spec, roster)
    assert (sheet.marks[1], sheet.marks[2], sheet.marks[3], sheet.marks[4]) == (1, 1, 0, 0)
    assert sheet.flags == ("NON_INTEGER_ANSWER",)
    assert sheet.total == 90


def test_copying_a_classmate(paper, spec, roster, tmp_path):
    me, mate = roster[5], roster[6]
    path = write_paper(paper, spec, me, tmp_path / f"{me.code}.xlsx",
                       answers=answer_key(spec, mate), env=derive_params(mate), name=me.name)
    sub = ingest_submission(path, paper)
    own = grade(sub, spec, roster)
    assert "PARAM_MISMATCH" in own.flags
    mine, theirs = answer_key(spec, me), answer_key(spec, mate)
    assert own.marks == {q: int(mine[q] == theirs[q]) for q in mine}
    trusting = grade(sub, spec, roster, param_source="submission")
    theirs_env_total = sum(f.weight for f in spec.families)
    assert trusting.total == theirs_env_total


def test_identification_fallbacks(paper, spec, roster, tmp_path):
    s = roster[7]
    by_name = write_paper(paper, spec, s, tmp_path / "renamed.xlsx")
    assert grade(ingest_submission(by_name, paper), spec, roster).code == s.code
    anon = write_paper(paper, spec, s, tmp_path / "anon.xlsx", name="")
    sheet = grade(ingest_submission(anon, paper), spec, roster)
    assert sheet.code == s.code and "MISSING_CELL" in sheet.flags
    stranger = StudentRecord("Nobody", "2020", "100", "999")
    lost = write_paper(paper, spec, stranger, tmp_path / "lost.xlsx")
    with pytest.raises(StudentNotFound):
        grade(ingest_submission(lost, paper), spec, [r for r in roster if r.code != "999"])


def test_unreadable_file(paper, tmp_path):
    bad = tmp_path / "111.xlsx"
    bad.write_bytes(b"not a zip")
    with pytest.raises(SubmissionError):
        ingest_submission(bad, paper)


@settings(max_examples=8)
@given(st.lists(st.text(st.characters(whitelist_categories=("L", "N", "P", "Zs")), min_size=1,
                        max_size=8).filter(lambda t: not t.startswith("=")), min_size=1, max_size=3))
def test_formula_content_never_changes_marks(junk):
    spec, roster, paper = _context()
    s = roster[8]
    with tempfile.TemporaryDirectory() as d:
        _check_junk(spec, roster, paper, s, Path(d) / f"{s.code}.xlsx", junk)


def _check_junk(spec, roster, paper, s, path, junk):
    write_paper(paper, spec, s, path)
    baseline = grade(ingest_submission(path, paper), spec, roster)
    wb = openpyxl.load_workbook(path)
    ws = wb.active
    formula_cells = [str(a) for a, c in paper.cells.items() if c.formula is not None]
    for k, ref in enumerate(formula_cells):
        ws[ref] = junk[k % len(junk)]
    wb.save(path)
    tampered = grade(ingest_submission(path, paper), spec, roster)
    assert tampered.marks == baseline.marks
    assert "LOCKED_CELL_EDITED" in tampered.flags


# -- batch ---------------------------------------------------------------------

def test_batch_reports(paper, spec, roster, tmp_path):
    subs = tmp_path / "subs"
    for s in roster[:4]:
        write_paper(paper, spec, s, subs / f"{s.code}.xlsx")
    (subs / "broken.xlsx").write_bytes(b"junk")
    res = batch_mark(subs, spec, roster, paper, tmp_path / "out")
    assert [s.code for s in res.sheets] == sorted(s.code for s in roster[:4])
    assert len(res.errors) == 1 and res.errors[0]["file"] == "broken.xlsx"
    rows = list(csv.reader(open(tmp_path / "out" / "marks.csv")))
    assert rows[0] == ["code", "name", *(f"q{i}" for i in range(1, 21)), "total", "flags"]
    assert all(r[-2] == "100" and r[-1] == "" for r in rows[1:])
    audit = json.loads((tmp_path / "out" / "audit.json").read_text())
    assert audit["files"] == 5 and audit["marked"] == 4 and audit["flagged"] == {}


def test_batch_empty_directory(paper, spec, roster, tmp_path):
    (tmp_path / "none").mkdir()
    res = batch_mark(tmp_path / "none", spec, roster, paper, tmp_path / "out")
    assert res.sheets == [] and res.ok
    assert (tmp_path / "out" / "marks.csv").read_text().count("\n") == 1


def test_batch_in_parallel_matches_serial(paper, spec, roster, tmp_path):
    for s in roster[:3]:
        write_paper(paper, spec, s, tmp_path / f"{s.code}.xlsx")
    serial = batch_mark(tmp_path, spec, roster, paper)
    parallel = batch_mark(tmp_path, spec, roster, paper, workers=2)
    assert [s.to_dict() for s in serial.sheets] == [s.to_dict() for s in parallel.sheets]


TAMPERS = ("none", "unprotect", "edit", "params")


@settings(max_examples=6)
@given(st.lists(st.sampled_from(TAMPERS), min_size=4, max_size=4))
def test_flags_match_injected_tampering(plan):
    with tempfile.TemporaryDirectory() as d:
        _check_tampering(Path(d), plan)


def _check_tampering(d, plan):
    spec, roster, paper = _context()
    chosen = roster[10:14]
    for s, kind in zip(chosen, plan):
        path = write_paper(paper, spec, s, d / f"{s.code}.xlsx")
        if kind == "none":
            continue
        wb = openpyxl.load_workbook(path)
        ws = wb.active
        if kind == "unprotect":
            ws.protection.sheet = False
        elif kind == "edit":
            ws["D23"] = "Determine nothing"
        else:
            ws["L20"] = derive_params(s).g3 % 9 + 1
        wb.save(path)
    res = batch_mark(d, spec, roster, paper)
    expected = {"none": (), "unprotect": ("UNPROTECTED",), "edit": ("LOCKED_CELL_EDITED",),
                "params": ("PARAM_MISMATCH",)}
    got = {s.code: s.flags for s in res.sheets}
    assert got == {s.code: expected[k] for s, k in zip(chosen, plan)}
