"""End-to-end demo: generate papers, simulate answers, mark, analyse.

A synthetic cohort sits the 20-question fixture exam.  Each simulated
student answers a question correctly with a probability that falls with the
number of parameters it involves; wrong answers are off by a small amount.
One student removes sheet protection and one edits a prompt cell, so the
audit shows both flags.

    python scripts/pipeline_demo.py [--out DIR] [--students 81] [--seed 1]
"""
import argparse
import random
import tempfile
import time
from pathlib import Path

import openpyxl

from examforge.analytics import correct_counts, correlation, export_scatter, observed_value_counts, question_stats
from examforge.exprlang import eval_expr
from examforge.marking import batch_mark
from examforge.model import derive_params, load_spec, synthetic_roster, write_roster
from examforge.workbook import build_marking_copy, emit_manifest, emit_xlsx, fill_answers, layout_exam

SPEC = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "exam20.json"


def simulate(spec, student, rng):
    env = derive_params(student)
    answers = {}
    for fam in spec.families:
        key = eval_expr(fam.answer, env)
        p_right = 0.95 - 0.05 * len(fam.params)
        answers[fam.id] = key if rng.random() < p_right else key + rng.choice([-2, -1, 1, 2])
    return answers


def run(out: Path, students: int, seed: int):
    rng = random.Random(seed)
    spec = load_spec(SPEC)
    roster = synthetic_roster(students, seed=seed)
    write_roster(roster, out / "roster.csv")

    t0 = time.perf_counter()
    paper = layout_exam(spec)
    (out / "manifest.json").write_text(emit_manifest(paper), encoding="utf-8")
    emit_xlsx(build_marking_copy(paper, spec), out / "marking.xlsx")
    subs = out / "submissions"
    for s in roster:
        filled = fill_answers(paper, derive_params(s), simulate(spec, s, rng), s.name)
        emit_xlsx(filled, subs / f"{s.code}.xlsx")
    print(f"generated and filled {len(roster)} papers in {time.perf_counter() - t0:.1f}s")

    for s, action in ((roster[0], "unprotect"), (roster[1], "edit")):
        path = subs / f"{s.code}.xlsx"
        wb = openpyxl.load_workbook(path)
        if action == "unprotect":
            wb.active.protection.sheet = False
        else:
            wb.active["D23"] = "An easier question"
        wb.save(path)

    t0 = time.perf_counter()
    res = batch_mark(subs, spec, roster, paper, out_dir=out / "marks")
    print(f"marked {len(res.sheets)} papers in {time.perf_counter() - t0:.1f}s; errors: {len(res.errors)}")
    totals = sorted(s.total for s in res.sheets)
    print(f"totals: min {totals[0]}, median {totals[len(totals) // 2]}, max {totals[-1]}")
    for s in res.sheets:
        if s.flags:
            print(f"  flagged {s.code} ({s.name}): {', '.join(s.flags)}")

    stats = question_stats(spec, observed_value_counts(roster), correct_counts(res.sheets))
    export_scatter(stats, out / "report")
    r1 = correlation([(s.num_params, s.correct) for s in stats])
    r2 = correlation([(s.ln_types, s.correct) for s in stats])
    print(f"Pearson r: parameters vs correct {r1:+.3f}, ln types vs correct {r2:+.3f}")
    print(f"outputs in {out}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", help="output directory (default: a temporary one)")
    ap.add_argument("--students", type=int, default=81)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        run(out, args.students, args.seed)
    else:
        with tempfile.TemporaryDirectory() as d:
            run(Path(d), args.students, args.seed)


if __name__ == "__main__":
    main()
