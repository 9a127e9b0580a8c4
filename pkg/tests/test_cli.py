import csv
import json

import openpyxl
import pytest

from conftest import FIXTURES
from helpers import write_paper

from examforge.cli import main
from examforge.codes import BucketScheme, find_collisions
from examforge.model import load_roster, synthetic_roster, write_roster
from examforge.workbook import layout_exam, legacy_password_hash

SPEC = str(FIXTURES / "exam20.json")


@pytest.fixture
def roster_csv(tmp_path):
    path = tmp_path / "roster.csv"
    write_roster(synthetic_roster(81, seed=3), path)
    return path


def test_validate_design_domain(capsys):
    # without a roster every year digit may be 0, and the ten-parameter
    # integral family is too large to enumerate
    assert main(["validate", "--spec", SPEC]) == 1
    out = capsys.readouterr().out
    assert "question 7: FAIL" in out
    assert "question 15: REFUSED" in out
    assert "question 20: ok" in out


def test_validate_with_roster_domain(roster_csv, tmp_path):
    report = tmp_path / "rep.json"
    assert main(["validate", "--spec", SPEC, "--roster", str(roster_csv), "--report", str(report)]) == 0
    reports = json.loads(report.read_text())
    assert len(reports) == 20 and all(r["admissible"] for r in reports)


def test_validate_coefficient_five_variant(tmp_path, capsys):
    doc = json.loads(open(SPEC).read())
    q4 = doc["families"][3]
    q4["prompt"] = q4["prompt"].replace("6x + 6y", "5x + 5y")
    q4["constraints"][0]["integrand"] = "5*x + 5*y"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["validate", "--spec", str(bad)]) == 1
    assert "question 4: FAIL" in capsys.readouterr().out


def test_validate_cap_refusal(capsys):
    assert main(["validate", "--spec", SPEC, "--cap", "1000"]) == 1
    assert "REFUSED" in capsys.readouterr().out


def test_missing_inputs_exit_2(tmp_path, capsys):
    assert main(["validate", "--spec", str(tmp_path / "nope.json")]) == 2
    assert main(["generate", "--spec", SPEC, "--roster", str(tmp_path / "nope.csv")]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["validate", "--spec", str(broken)]) == 2
    assert "examforge:" in capsys.readouterr().err


def test_generate_is_idempotent(roster_csv, tmp_path, monkeypatch):
    monkeypatch.setenv("EXAMFORGE_PASSWORD", "s3cret")
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["generate", "--spec", SPEC, "--roster", str(roster_csv), "--out", str(out)]) == 0
    files = sorted(p.name for p in (a / "papers").iterdir())
    assert len(files) == 81
    for name in files:
        assert (a / "papers" / name).read_bytes() == (b / "papers" / name).read_bytes()
    for name in ("manifest.json", "marking_manifest.json", "marking.xlsx"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["protection"]["password_hash"] == legacy_password_hash("s3cret")


def test_simulate_short_quiz(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--spec", SPEC, "--questions", "5", "--students", "12", "--out", str(out)]) == 0
    papers = list((out / "papers").glob("*.xlsx"))
    assert len(papers) == 12
    manifest = json.loads((out / "manifest.json").read_text())
    assert [q["id"] for q in manifest["questions"]] == [1, 2, 3, 4, 5]
    ws = openpyxl.load_workbook(papers[0]).active
    assert ws.protection.sheet


def test_mark_round_trip(roster_csv, tmp_path, spec):
    roster = load_roster(roster_csv)
    paper = layout_exam(spec)
    subs = tmp_path / "subs"
    for s in roster[:5]:
        write_paper(paper, spec, s, subs / f"{s.code}.xlsx")
    out = tmp_path / "marks"
    assert main(["mark", "--spec", SPEC, "--roster", str(roster_csv), "--submissions", str(subs),
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "marks.csv")))
    assert len(rows) == 5 and {r["total"] for r in rows} == {"100"}
    (subs / "junk.xlsx").write_text("junk")
    assert main(["mark", "--spec", SPEC, "--roster", str(roster_csv), "--submissions", str(subs),
                 "--out", str(out)]) == 1
    report = tmp_path / "report"
    assert main(["report", "--spec", SPEC, "--roster", str(roster_csv), "--marks", str(out / "marks.csv"),
                 "--out", str(report)]) == 0
    for name in ("stats.csv", "scatter_params.csv", "scatter_lntypes.csv"):
        assert (report / name).exists()


def test_mark_empty_directory(roster_csv, tmp_path):
    (tmp_path / "empty").mkdir()
    out = tmp_path / "out"
    assert main(["mark", "--spec", SPEC, "--roster", str(roster_csv), "--submissions",
                 str(tmp_path / "empty"), "--out", str(out)]) == 0
    assert (out / "marks.csv").read_text().splitlines() == [
        "code,name," + ",".join(f"q{i}" for i in range(1, 21)) + ",total,flags"]


def test_codes_honours_groups(roster_csv, tmp_path):
    roster = load_roster(roster_csv)
    groups = [[roster[0].name, roster[1].name, roster[2].name], [roster[3].name, roster[4].name]]
    gfile = tmp_path / "groups.json"
    gfile.write_text(json.dumps(groups))
    out = tmp_path / "codes"
    assert main(["codes", "--roster", str(roster_csv), "--groups", str(gfile), "--out", str(out)]) == 0
    new = load_roster(out / "codes.csv")
    assert find_collisions(new, groups, [1, 2, 3], BucketScheme.three_way()) == []
    gfile.write_text(json.dumps([[s.name for s in roster[:4]]]))
    assert main(["codes", "--roster", str(roster_csv), "--groups", str(gfile), "--out", str(out)]) == 1
    gfile.write_text(json.dumps([["Nobody", roster[0].name]]))
    assert main(["codes", "--roster", str(roster_csv), "--groups", str(gfile), "--out", str(out)]) == 2
