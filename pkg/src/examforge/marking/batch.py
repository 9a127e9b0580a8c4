"""Mark a directory of submissions and write the reports."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .grade import FLAGS, grade
from .ingest import ingest_submission


@dataclass
class BatchResult:
    sheets: list = field(default_factory=list)  # MarkSheet, ordered by code
    errors: list = field(default_factory=list)  # {"file", "error"}
    diffs: dict = field(default_factory=dict)  # file -> locked-cell diff

    @property
    def ok(self) -> bool:
        return not self.errors


def _mark_one(args):
    path, canonical, spec, roster, param_source = args
    try:
        sub = ingest_submission(path, canonical)
        return grade(sub, spec, roster, param_source), sub.locked_cell_diff, None
    except Exception as exc:  # one bad file must not stop the batch
        return None, None, f"{type(exc).__name__}: {exc}"


def batch_mark(directory, spec, roster, canonical, out_dir=None,
               param_source: str = "roster", workers: int = 1) -> BatchResult:
    """Grade every ``*.xlsx`` under ``directory``.

    With ``out_dir`` set, writes ``marks.csv`` and ``audit.json`` there.
    """
    files = sorted(p for p in Path(directory).glob("*.xlsx") if not p.name.startswith("~$"))
    jobs = [(p, canonical, spec, roster, param_source) for p in files]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_mark_one, jobs))
    else:
        results = [_mark_one(j) for j in jobs]
    res = BatchResult()
    for path, (sheet, diff, err) in zip(files, results):
        if err is not None:
            res.errors.append({"file": path.name, "error": err})
        else:
            res.sheets.append(sheet)
            res.diffs[path.name] = diff
    res.sheets.sort(key=lambda s: (s.code, s.source))
    if out_dir is not None:
        write_reports(res, spec, out_dir)
    return res


def write_reports(res: BatchResult, spec, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ids = [f.id for f in spec.families]
    with open(out / "marks.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["code", "name", *(f"q{i}" for i in ids), "total", "flags"])
        for s in res.sheets:
            w.writerow([s.code, s.name, *(s.marks[i] for i in ids), s.total, ";".join(s.flags)])
    flagged = {f: [s.code for s in res.sheets if f in s.flags] for f in FLAGS}
    audit = {
        "files": len(res.sheets) + len(res.errors),
        "marked": len(res.sheets),
        "errors": res.errors,
        "flagged": {f: codes for f, codes in flagged.items() if codes},
        "submissions": [
            {**s.to_dict(), "locked_cell_diff": res.diffs.get(s.source, [])}
            for s in res.sheets if s.flags
        ],
    }
    (out / "audit.json").write_text(json.dumps(audit, indent=2, ensure_ascii=False, default=str) + "\n",
                                    encoding="utf-8")
