"""Exact determinant, rank and inverse entries of small integer matrices."""
from __future__ import annotations

from fractions import Fraction


class SingularMatrix(ZeroDivisionError):
    pass


def _square(m):
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError(f"matrix is not square: {n} rows, row lengths {[len(r) for r in m]}")
    return n


def det_exact(m) -> int:
    """Bareiss fraction-free elimination; integer in, integer out."""
    n = _square(m)
    if n == 0:
        return 1
    a = [[int(x) for x in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank_exact(m) -> int:
    rows = [[Fraction(x) for x in row] for row in m]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col] / p
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def inverse_exact(m) -> list:
    n = _square(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def inverse_entry_exact(m, i: int, j: int) -> Fraction:
    """Entry (i, j) of the inverse, 1-based as in textbook notation."""
    n = _square(m)
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"entry ({i},{j}) outside a {n}x{n} matrix")
    return inverse_exact(m)[i - 1][j - 1]
