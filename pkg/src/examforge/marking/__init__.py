"""Ingest, grade and batch-mark submitted papers."""
from .batch import BatchResult, batch_mark, write_reports
from .formula import FormulaError, eval_formula, evaluate, parse_formula
from .grade import FLAGS, PARAM_SOURCES, MarkSheet, StudentNotFound, grade, identify, parse_integer
from .ingest import Submission, SubmissionError, ingest_submission

__all__ = [
    "BatchResult", "batch_mark", "write_reports", "FormulaError", "eval_formula", "evaluate",
    "parse_formula", "FLAGS", "PARAM_SOURCES", "MarkSheet", "StudentNotFound", "grade", "identify",
    "parse_integer", "Submission", "SubmissionError", "ingest_submission",
]
