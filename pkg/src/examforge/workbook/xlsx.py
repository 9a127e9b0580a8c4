"""Deterministic OOXML (.xlsx) writer for a ``WorkbookModel``.

Only the parts a single protected sheet needs are written.  Entries carry a
fixed timestamp and a fixed order, so equal models give byte-equal files.
"""
from __future__ import annotations

import io
import zipfile
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .cells import col_index, col_letters

FIXED_DATE = (1980, 1, 1, 0, 0, 0)
_NS = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
_REL = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
_PKG_REL = "http://schemas.openxmlformats.org/package/2006/relationships"


def legacy_password_hash(password: str) -> str:
    """The 16-bit sheet-protection verifier, as four uppercase hex digits.

    Each character's low 15 bits are rotated left within 15 bits by its
    1-based position, all results are XORed together, then the length and
    the constant 0xCE4B are XORed in.
    """
    h = 0
    for i, ch in enumerate(password, 1):
        v = ord(ch) & 0x7FFF
        r = i % 15
        h ^= ((v << r) | (v >> (15 - r))) & 0x7FFF
    h ^= len(password)
    h ^= 0xCE4B
    return f"{h:04X}"


def _style_key(c):
    return (c.locked, c.hidden, c.bold, c.align or "", c.border)


def _styles_xml(keys, font, size) -> str:
    xfs = []
    for locked, hidden, bold, align, border in keys:
        alignment = f'<alignment horizontal="{align}" vertical="center"/>' if align else '<alignment vertical="center"/>'
        xfs.append(
            f'<xf numFmtId="0" fontId="{int(bold)}" fillId="0" borderId="{int(border)}" xfId="0"'
            f' applyFont="1" applyBorder="1" applyAlignment="1" applyProtection="1">'
            f'{alignment}<protection locked="{int(locked)}" hidden="{int(hidden)}"/></xf>')
    f = quoteattr(font)
    thin = '<left style="thin"/><right style="thin"/><top style="thin"/><bottom style="thin"/><diagonal/>'
    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f'<styleSheet xmlns="{_NS}">'
        f'<fonts count="2"><font><sz val="{size}"/><name val={f}/></font>'
        f'<font><b/><sz val="{size}"/><name val={f}/></font></fonts>'
        '<fills count="2"><fill><patternFill patternType="none"/></fill>'
        '<fill><patternFill patternType="gray125"/></fill></fills>'
        '<borders count="2"><border><left/><right/><top/><bottom/><diagonal/></border>'
        f'<border>{thin}</border></borders>'
        '<cellStyleXfs count="1"><xf numFmtId="0" fontId="0" fillId="0" borderId="0"/></cellStyleXfs>'
        f'<cellXfs count="{len(xfs)}">{"".join(xfs)}</cellXfs>'
        '<cellStyles count="1"><cellStyle name="Normal" xfId="0" builtinId="0"/></cellStyles>'
        '</styleSheet>')


def _cell_xml(ref, cell, style) -> str:
    s = f' s="{style}"' if style else ""
    if cell.formula is not None:
        return f'<c r="{ref}"{s}><f>{escape(cell.formula)}</f></c>'
    v = cell.value
    if v is None:
        return f'<c r="{ref}"{s}/>'
    if isinstance(v, bool):
        return f'<c r="{ref}"{s} t="b"><v>{int(v)}</v></c>'
    if isinstance(v, (int, float)):
        return f'<c r="{ref}"{s}><v>{v}</v></c>'
    return f'<c r="{ref}"{s} t="inlineStr"><is><t xml:space="preserve">{escape(str(v))}</t></is></c>'


def _sheet_xml(model, style_of) -> str:
    parts = ['<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n',
             f'<worksheet xmlns="{_NS}" xmlns:r="{_REL}">']
    if model.cells:
        dim = f"A1:{col_letters(model.max_col())}{model.max_row()}"
        parts.append(f'<dimension ref="{dim}"/>')
    parts.append(f'<sheetViews><sheetView showGridLines="{int(model.gridlines)}" workbookViewId="0"/></sheetViews>')
    parts.append(f'<sheetFormatPr baseColWidth="2" defaultColWidth="{model.default_width:g}" defaultRowHeight="15"/>')
    if model.col_widths:
        cols = "".join(
            f'<col min="{col_index(c)}" max="{col_index(c)}" width="{w:g}" customWidth="1"/>'
            for c, w in sorted(model.col_widths.items(), key=lambda kv: col_index(kv[0])))
        parts.append(f"<cols>{cols}</cols>")
    parts.append("<sheetData>")
    rows = {}
    for a in sorted(model.cells):
        rows.setdefault(a.row, []).append(a)
    for r, addrs in rows.items():
        parts.append(f'<row r="{r}">')
        parts.extend(_cell_xml(str(a), model.cells[a], style_of(model.cells[a])) for a in addrs)
        parts.append("</row>")
    parts.append("</sheetData>")
    if model.protection:
        pw = f' password="{model.password_hash}"' if model.password_hash else ""
        parts.append(f'<sheetProtection{pw} sheet="1" objects="1" scenarios="1"/>')
    if model.merges:
        parts.append(f'<mergeCells count="{len(model.merges)}">')
        parts.extend(f'<mergeCell ref="{m}"/>' for m in model.merges)
        parts.append("</mergeCells>")
    parts.append('<pageMargins left="0.7" right="0.7" top="0.75" bottom="0.75" header="0.3" footer="0.3"/>')
    if model.row_breaks:
        parts.append(f'<rowBreaks count="{len(model.row_breaks)}" manualBreakCount="{len(model.row_breaks)}">')
        parts.extend(f'<brk id="{r}" max="16383" man="1"/>' for r in sorted(model.row_breaks))
        parts.append("</rowBreaks>")
    if model.col_breaks:
        parts.append(f'<colBreaks count="{len(model.col_breaks)}" manualBreakCount="{len(model.col_breaks)}">')
        parts.extend(f'<brk id="{c}" max="1048575" man="1"/>' for c in sorted(model.col_breaks))
        parts.append("</colBreaks>")
    parts.append("</worksheet>")
    return "".join(parts)


def xlsx_parts(model) -> list:
    """(name, bytes) pairs of the package, in write order."""
    keys = [(True, False, False, "", False)]  # style 0: the default look
    index = {keys[0]: 0}
    for a in sorted(model.cells):
        k = _style_key(model.cells[a])
        if k not in index:
            index[k] = len(keys)
            keys.append(k)

    def style_of(cell):
        return index[_style_key(cell)]

    sheet = _sheet_xml(model, style_of)
    name = quoteattr(model.sheet_name)
    content_types = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        '<Default Extension="xml" ContentType="application/xml"/>'
        '<Override PartName="/xl/workbook.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>'
        '<Override PartName="/xl/worksheets/sheet1.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml"/>'
        '<Override PartName="/xl/styles.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.styles+xml"/>'
        '</Types>')
    root_rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f'<Relationships xmlns="{_PKG_REL}">'
        '<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/'
        'relationships/officeDocument" Target="xl/workbook.xml"/></Relationships>')
    workbook = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f'<workbook xmlns="{_NS}" xmlns:r="{_REL}">'
        f'<sheets><sheet name={name} sheetId="1" r:id="rId1"/></sheets>'
        '<calcPr calcId="191029" fullCalcOnLoad="1"/></workbook>')
    wb_rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f'<Relationships xmlns="{_PKG_REL}">'
        '<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/'
        'relationships/worksheet" Target="worksheets/sheet1.xml"/>'
        '<Relationship Id="rId2" Type="http://schemas.openxmlformats.org/officeDocument/2006/'
        'relationships/styles" Target="styles.xml"/></Relationships>')
    return [
        ("[Content_Types].xml", content_types.encode()),
        ("_rels/.rels", root_rels.encode()),
        ("xl/workbook.xml", workbook.encode()),
        ("xl/_rels/workbook.xml.rels", wb_rels.encode()),
        ("xl/styles.xml", _styles_xml(keys, model.font, model.font_size).encode()),
        ("xl/worksheets/sheet1.xml", sheet.encode()),
    ]


def xlsx_bytes(model) -> bytes:
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, data in xlsx_parts(model):
            info = zipfile.ZipInfo(name, date_time=FIXED_DATE)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            zf.writestr(info, data)
    return buf.getvalue()


def emit_xlsx(model, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(xlsx_bytes(model))
    return path
