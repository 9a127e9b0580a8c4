"""Type counts per question and the correctness correlation analysis."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .exprlang import PARAMS
from .model import derive_params


@dataclass(frozen=True)
class ValueCounts:
    """Number of distinct values each parameter takes in a cohort."""

    counts: dict

    def __post_init__(self):
        for p in PARAMS:
            n = self.counts.get(p)
            cap = 9 if p.startswith("g") else 10
            if not isinstance(n, int) or not 1 <= n <= cap:
                raise ValueError(f"value count for {p} must be an integer in 1..{cap}, got {n!r}")

    def __getitem__(self, p):
        return self.counts[p]

    def as_tuple(self) -> tuple:
        return tuple(self.counts[p] for p in PARAMS)


def observed_value_counts(roster) -> ValueCounts:
    envs = [derive_params(s) for s in roster]
    if not envs:
        raise ValueError("empty roster")
    return ValueCounts({p: len({e[p] for e in envs}) for p in PARAMS})


def count_types(family_or_params, counts: ValueCounts) -> int:
    """Product of the value counts of the parameters a question uses."""
    if hasattr(family_or_params, "involved_params"):
        params = family_or_params.involved_params()
    else:
        params = frozenset(family_or_params)
    unknown = params - frozenset(PARAMS)
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)}")
    return math.prod(counts[p] for p in params)


@dataclass(frozen=True)
class QuestionStats:
    question: int
    params: tuple
    types: int
    correct: int

    @property
    def num_params(self) -> int:
        return len(self.params)

    @property
    def ln_types(self) -> float:
        return math.log(self.types)


def question_stats(spec, counts: ValueCounts, correct: dict) -> list:
    return [QuestionStats(f.id, tuple(p for p in PARAMS if p in f.involved_params()),
                          count_types(f, counts), int(correct.get(f.id, 0)))
            for f in spec.families]


def correct_counts(sheets) -> dict:
    """Per question, how many mark sheets have it right."""
    out = {}
    for s in sheets:
        for q, m in s.marks.items():
            out[q] = out.get(q, 0) + int(m > 0)
    return out


def correlation(pairs) -> float:
    """Pearson product-moment correlation of (x, y) pairs."""
    pts = [(float(x), float(y)) for x, y in pairs]
    n = len(pts)
    if n < 3:
        raise ValueError("correlation needs at least 3 pairs")
    mx = math.fsum(x for x, _ in pts) / n
    my = math.fsum(y for _, y in pts) / n
    sxx = math.fsum((x - mx) ** 2 for x, _ in pts)
    syy = math.fsum((y - my) ** 2 for _, y in pts)
    sxy = math.fsum((x - mx) * (y - my) for x, y in pts)
    if sxx == 0 or syy == 0:
        raise ValueError("correlation undefined: a coordinate has zero variance")
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def stats_csv(stats) -> str:
    return _csv(["question", "params", "num_params", "types", "correct"],
                [[s.question, " ".join(s.params), s.num_params, s.types, s.correct] for s in stats])


def export_scatter(stats, out_dir=None) -> tuple:
    """CSV text for (parameters, correct) and (ln types, correct).

    Coordinates are rounded to two decimals.  With ``out_dir`` set, the
    files ``scatter_params.csv`` and ``scatter_lntypes.csv`` are written.
    """
    by_params = _csv(["num_params", "correct"], [[s.num_params, s.correct] for s in stats])
    by_types = _csv(["ln_types", "correct"], [[f"{s.ln_types:.2f}", s.correct] for s in stats])
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scatter_params.csv").write_text(by_params, encoding="utf-8")
        (out / "scatter_lntypes.csv").write_text(by_types, encoding="utf-8")
    return by_params, by_types
