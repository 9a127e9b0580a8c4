"""Spreadsheet cell addresses."""
from __future__ import annotations

import re
from dataclasses import dataclass

_ADDR = re.compile(r"^\$?([A-Z]{1,3})\$?([1-9][0-9]*)$")
MAX_COL = 16384
MAX_ROW = 1048576


def col_index(letters: str) -> int:
    n = 0
    for ch in letters.upper():
        if not "A" <= ch <= "Z":
            raise ValueError(f"invalid column letters {letters!r}")
        n = n * 26 + (ord(ch) - 64)
    if not 1 <= n <= MAX_COL:
        raise ValueError(f"column {letters!r} out of range")
    return n


def col_letters(index: int) -> str:
    if not 1 <= index <= MAX_COL:
        raise ValueError(f"column index {index} out of range")
    out = ""
    while index:
        index, rem = divmod(index - 1, 26)
        out = chr(65 + rem) + out
    return out


@dataclass(frozen=True, order=True)
class CellAddress:
    row: int
    col: int

    def __post_init__(self):
        if not (1 <= self.row <= MAX_ROW and 1 <= self.col <= MAX_COL):
            raise ValueError(f"cell ({self.row}, {self.col}) outside the sheet")

    @classmethod
    def parse(cls, text: str) -> "CellAddress":
        m = _ADDR.match(text.strip().upper())
        if not m:
            raise ValueError(f"invalid cell address {text!r}")
        return cls(int(m.group(2)), col_index(m.group(1)))

    def __str__(self):
        return f"{col_letters(self.col)}{self.row}"

    def offset(self, rows: int = 0, cols: int = 0) -> "CellAddress":
        return CellAddress(self.row + rows, self.col + cols)


def addr(text_or_addr) -> CellAddress:
    if isinstance(text_or_addr, CellAddress):
        return text_or_addr
    return CellAddress.parse(text_or_addr)
