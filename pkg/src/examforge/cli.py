"""Command-line front end: ``examforge {validate|generate|codes|mark|report|simulate}``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import analytics, codes
from .admissibility import DomainSpec, DomainTooLarge, check_family
from .admissibility.checker import DEFAULT_CAP
from .model import SpecError, load_roster, load_spec, synthetic_roster, write_roster
from .workbook import (CellMap, LayoutError, build_marking_copy, emit_manifest, emit_xlsx,
                       layout_exam)

PASSWORD_ENV = "EXAMFORGE_PASSWORD"


class UsageError(Exception):
    """Bad input files or arguments (exit status 2)."""


@dataclass
class Config:
    spec: Path | None = None
    roster: Path | None = None
    out: Path = Path("out")
    seed: int = 0
    cell_map: dict = field(default_factory=dict)
    param_source: str = "roster"
    cap: int = DEFAULT_CAP


def _path(p):
    return Path(p).expanduser().resolve() if p else None


def _config(args) -> Config:
    cfg = Config(spec=_path(getattr(args, "spec", None)), roster=_path(getattr(args, "roster", None)),
                 out=_path(getattr(args, "out", None) or "out"), seed=getattr(args, "seed", 0),
                 param_source=getattr(args, "param_source", "roster"),
                 cap=getattr(args, "cap", DEFAULT_CAP))
    cm = getattr(args, "cell_map", None)
    if cm:
        try:
            cfg.cell_map = json.loads(Path(cm).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cell map: {exc}") from None
    return cfg


def _load_spec(cfg):
    if cfg.spec is None:
        raise UsageError("--spec is required")
    try:
        return load_spec(cfg.spec)
    except FileNotFoundError:
        raise UsageError(f"spec: no such file {cfg.spec}") from None
    except SpecError as exc:
        raise UsageError(f"spec: {exc}") from None


def _load_roster(cfg, required=True):
    if cfg.roster is None:
        if required:
            raise UsageError("--roster is required")
        return None
    try:
        return load_roster(cfg.roster)
    except FileNotFoundError:
        raise UsageError(f"roster: no such file {cfg.roster}") from None
    except (SpecError, ValueError) as exc:
        raise UsageError(f"roster: {exc}") from None


def _cell_map(cfg, spec) -> CellMap:
    try:
        return CellMap.from_dict({**spec.cell_map, **cfg.cell_map})
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cell map: {exc}") from None


# -- subcommands -------------------------------------------------------------

def cmd_validate(args) -> int:
    cfg = _config(args)
    spec = _load_spec(cfg)
    roster = _load_roster(cfg, required=False)
    domain = DomainSpec.from_roster(roster) if roster else DomainSpec.design()
    reports = []
    status = 0
    for fam in spec.families:
        t0 = time.perf_counter()
        try:
            rep = check_family(fam, domain, cfg.cap)
        except DomainTooLarge as exc:
            print(f"admissibility: question {fam.id}: REFUSED ({exc})")
            reports.append({"family": fam.id, "refused": str(exc)})
            status = 1
            continue
        dt = time.perf_counter() - t0
        verdict = "ok" if rep.admissible else f"FAIL ({rep.total_violations:,} violating points)"
        print(f"admissibility: question {fam.id}: {verdict}; {rep.points_checked:,} points in {dt:.2f}s")
        for v in rep.violations[:3]:
            kinds = "; ".join(f"{f['kind']}: {f['detail']}" for f in v["failed"])
            print(f"    at {v['env']}: {kinds}")
        reports.append(rep.to_dict())
        if not rep.admissible:
            status = 1
    if getattr(args, "report", None):
        Path(args.report).write_text(json.dumps(reports, indent=2, ensure_ascii=False) + "\n",
                                     encoding="utf-8")
    return status


def _generate(cfg, spec, roster, prefill=False) -> int:
    from .model import derive_params
    from .workbook import fill_answers

    cm = _cell_map(cfg, spec)
    password = os.environ.get(PASSWORD_ENV)
    try:
        paper = layout_exam(spec, cm, password=password)
    except LayoutError as exc:
        raise UsageError(f"workbook: {exc}") from None
    marking = build_marking_copy(paper, spec, cm)
    out = cfg.out
    papers = out / "papers"
    papers.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(emit_manifest(paper), encoding="utf-8")
    (out / "marking_manifest.json").write_text(emit_manifest(marking), encoding="utf-8")
    emit_xlsx(marking, out / "marking.xlsx")
    for s in roster:
        model = fill_answers(paper, derive_params(s), name=s.name) if prefill else paper
        emit_xlsx(model, papers / f"{s.code}.xlsx")
    print(f"workbook: wrote {len(roster)} papers to {papers}")
    return 0


def cmd_generate(args) -> int:
    cfg = _config(args)
    spec = _load_spec(cfg)
    roster = _load_roster(cfg)
    if args.questions:
        spec = _truncate(spec, args.questions)
    return _generate(cfg, spec, roster, prefill=args.prefill)


def _truncate(spec, k):
    try:
        return spec.truncated(k)
    except SpecError as exc:
        raise UsageError(f"spec: {exc}") from None


def cmd_simulate(args) -> int:
    cfg = _config(args)
    spec = _truncate(_load_spec(cfg), args.questions)
    roster = _load_roster(cfg, required=False)
    if roster is None:
        roster = synthetic_roster(args.students, seed=cfg.seed)
        cfg.out.mkdir(parents=True, exist_ok=True)
        write_roster(roster, cfg.out / "roster.csv")
    return _generate(cfg, spec, roster, prefill=args.prefill)


def _load_groups(path) -> list:
    if path is None:
        return []
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"groups: {exc}") from None
    if p.suffix == ".json":
        try:
            groups = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"groups: {exc}") from None
    else:
        groups = [[n.strip() for n in line.split(",") if n.strip()]
                  for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not all(isinstance(g, list) and all(isinstance(n, str) for n in g) for g in groups):
        raise UsageError("groups: expected a list of lists of student names")
    return groups


def cmd_codes(args) -> int:
    cfg = _config(args)
    if cfg.roster is not None:
        roster = _load_roster(cfg)
    else:
        roster = synthetic_roster(args.students, seed=cfg.seed)
    if args.fresh:
        fresh = codes.generate_codes(len(roster), seed=cfg.seed)
        roster = [replace(s, code=c) for s, c in zip(roster, fresh)]
    groups = _load_groups(args.groups)
    if args.scheme == "params":
        spec = _load_spec(cfg)
        scheme, questions = None, list(spec.families)
    else:
        scheme = codes.BucketScheme.three_way() if args.scheme == "three" else codes.BucketScheme.two_way()
        questions = [1, 2, 3]
    try:
        roster = codes.enforce_distinctness(roster, groups, questions, scheme, seed=cfg.seed)
    except codes.InfeasibleGroup as exc:
        print(f"codes: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        raise UsageError(f"groups: {exc.args[0]}") from None
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_roster(roster, cfg.out / "codes.csv")
    print(f"codes: wrote {len(roster)} codes to {cfg.out / 'codes.csv'}")
    return 0


def cmd_mark(args) -> int:
    from .marking import batch_mark

    cfg = _config(args)
    spec = _load_spec(cfg)
    if args.questions:
        spec = _truncate(spec, args.questions)
    roster = _load_roster(cfg)
    cm = _cell_map(cfg, spec)
    canonical = layout_exam(spec, cm)
    subs = Path(args.submissions)
    if not subs.is_dir():
        raise UsageError(f"mark: no such directory {subs}")
    res = batch_mark(subs, spec, roster, canonical, cfg.out, param_source=cfg.param_source,
                     workers=args.workers)
    flagged = sum(1 for s in res.sheets if s.flags)
    print(f"marking: {len(res.sheets)} marked, {flagged} flagged, {len(res.errors)} unreadable")
    for e in res.errors:
        print(f"marking: {e['file']}: {e['error']}", file=sys.stderr)
    return 0 if res.ok else 1


def _correct_from_marks(path) -> dict:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for r in rows:
        for k, v in r.items():
            if k and k.startswith("q") and k[1:].isdigit():
                out[int(k[1:])] = out.get(int(k[1:]), 0) + int(v)
    return out


def cmd_report(args) -> int:
    cfg = _config(args)
    spec = _load_spec(cfg)
    if args.questions:
        spec = _truncate(spec, args.questions)
    roster = _load_roster(cfg)
    counts = analytics.observed_value_counts(roster)
    correct = {}
    if args.marks:
        try:
            correct = _correct_from_marks(args.marks)
        except (OSError, ValueError) as exc:
            raise UsageError(f"marks: {exc}") from None
    stats = analytics.question_stats(spec, counts, correct)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "stats.csv").write_text(analytics.stats_csv(stats), encoding="utf-8")
    analytics.export_scatter(stats, cfg.out)
    print("analytics: value counts " + " ".join(f"{p}={n}" for p, n in counts.counts.items()))
    for label, xs in (("parameters", [s.num_params for s in stats]),
                      ("ln types", [s.ln_types for s in stats])):
        try:
            r = analytics.correlation(list(zip(xs, [s.correct for s in stats])))
            print(f"analytics: Pearson r ({label} vs correct) = {r:.6f}")
        except ValueError as exc:
            print(f"analytics: Pearson r ({label} vs correct) undefined: {exc}")
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="examforge", description="Parameterised examination papers.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True, roster=True, out=True):
        if spec:
            p.add_argument("--spec", help="exam spec JSON")
        if roster:
            p.add_argument("--roster", help="roster CSV or JSON")
        if out:
            p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cell-map", help="JSON file overriding cell addresses")

    p = sub.add_parser("validate", help="check every question family for admissibility")
    common(p, out=False)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest domain to enumerate")
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("generate", help="write one protected paper per student")
    common(p)
    p.add_argument("--questions", type=int, help="keep only the first k questions")
    p.add_argument("--prefill", action="store_true", help="fill in each student's form")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("simulate", help="generate a short k-question quiz")
    common(p)
    p.add_argument("--questions", type=int, default=5)
    p.add_argument("--students", type=int, default=81, help="synthetic roster size without --roster")
    p.add_argument("--prefill", action="store_true")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("codes", help="assign examination codes honouring collusion groups")
    common(p)
    p.add_argument("--groups", help="JSON list of name lists, or one comma-separated group per line")
    p.add_argument("--scheme", choices=("three", "two", "params"), default="three")
    p.add_argument("--fresh", action="store_true", help="redraw every code before solving")
    p.add_argument("--students", type=int, default=81, help="synthetic roster size without --roster")
    p.set_defaults(fn=cmd_codes)

    p = sub.add_parser("mark", help="mark a directory of submissions")
    common(p)
    p.add_argument("--submissions", required=True, help="directory of .xlsx files")
    p.add_argument("--param-source", choices=("roster", "submission"), default="roster")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--questions", type=int, help="the papers hold only the first k questions")
    p.set_defaults(fn=cmd_mark)

    p = sub.add_parser("report", help="type counts, scatter data and correlations")
    common(p)
    p.add_argument("--marks", help="marks.csv from the mark command")
    p.add_argument("--questions", type=int, help="keep only the first k questions")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"examforge: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"examforge: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
