"""Reproduce the per-question type counts and the correctness correlations.

Reads the reference value counts, parameter checklists and correct counts
from tests/fixtures/type_table.json, recomputes the number of types per
question and the two Pearson coefficients, and writes the scatter CSVs.

    python scripts/type_table.py [--out DIR]
"""
import argparse
import json
import math
from pathlib import Path

from examforge.analytics import QuestionStats, ValueCounts, correlation, count_types, export_scatter

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "type_table.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", help="directory for scatter_params.csv and scatter_lntypes.csv")
    args = ap.parse_args()

    table = json.loads(FIXTURE.read_text(encoding="utf-8"))
    counts = ValueCounts(table["value_counts"])
    print("value counts:", " ".join(f"{p}={n}" for p, n in counts.counts.items()))
    print(f"{'Q':>3}  {'parameters':<34} {'#':>2} {'types':>9} {'ln':>6} {'correct':>7}  check")
    stats = []
    for row in table["rows"]:
        types = count_types(row["params"], counts)
        ok = "ok" if types == row["types"] else f"expected {row['types']}"
        print(f"{row['question']:>3}  {', '.join(row['params']):<34} {len(row['params']):>2} "
              f"{types:>9} {math.log(types):>6.2f} {row['correct']:>7}  {ok}")
        stats.append(QuestionStats(row["question"], tuple(row["params"]), types, row["correct"]))

    r1 = correlation([(s.num_params, s.correct) for s in stats])
    r2 = correlation([(s.ln_types, s.correct) for s in stats])
    print(f"Pearson r, number of parameters vs correct: {r1:.6f}")
    print(f"Pearson r, ln(number of types) vs correct:  {r2:.6f}")
    if args.out:
        export_scatter(stats, args.out)
        print(f"wrote scatter CSVs to {args.out}")


if __name__ == "__main__":
    main()
