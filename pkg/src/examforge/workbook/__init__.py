"""Paper layout, marking copy and spreadsheet output."""
from .cells import CellAddress, addr, col_index, col_letters
from .layout import LayoutError, build_marking_copy, fill_answers, layout_exam
from .manifest import emit_manifest
from .model import DEFAULT_PARAM_CELLS, Cell, CellMap, QuestionSlot, WorkbookModel
from .xlsx import emit_xlsx, legacy_password_hash, xlsx_bytes

__all__ = [
    "CellAddress", "addr", "col_index", "col_letters", "LayoutError", "build_marking_copy",
    "fill_answers", "layout_exam", "emit_manifest", "DEFAULT_PARAM_CELLS", "Cell", "CellMap",
    "QuestionSlot", "WorkbookModel", "emit_xlsx", "legacy_password_hash", "xlsx_bytes",
]
