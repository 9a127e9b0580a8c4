"""Random unimodular integer matrix templates."""
from __future__ import annotations

import random

from ..exprlang import BinOp, Lit, Neg, Param, PromptTemplate, serialise
from .exact import det_exact

OPS = ("row_add", "col_add", "row_swap", "row_neg")


class ConstructionFailed(RuntimeError):
    pass


def _lit(k: int):
    return Lit(k) if k >= 0 else Neg(Lit(-k))


def apply_op(m, op):
    """Apply one elementary operation in place; ``op`` is a tuple like
    ``("row_add", target, source, multiplier)`` (indices 0-based)."""
    kind = op[0]
    n = len(m)
    if kind == "row_add":
        _, i, j, k = op
        m[i] = [a + k * b for a, b in zip(m[i], m[j])]
    elif kind == "col_add":
        _, i, j, k = op
        for r in range(n):
            m[r][i] += k * m[r][j]
    elif kind == "row_swap":
        _, i, j = op
        m[i], m[j] = m[j], m[i]
    elif kind == "row_neg":
        _, i = op
        m[i] = [-a for a in m[i]]
    else:
        raise ValueError(f"unknown elementary operation {kind!r}")


def random_ops(size: int, count: int, rng: random.Random) -> list:
    ops = []
    for _ in range(count):
        kind = rng.choice(OPS[:2] * 3 + OPS[2:])  # favour shears over swaps
        i, j = rng.sample(range(size), 2)
        if kind in ("row_add", "col_add"):
            ops.append((kind, i, j, rng.choice((-2, -1, 1, 2))))
        elif kind == "row_swap":
            ops.append((kind, i, j))
        else:
            ops.append((kind, i))
    return ops


def _cofactor(m, i, j) -> int:
    minor = [r[:j] + r[j + 1:] for k, r in enumerate(m) if k != i]
    return (-1) ** (i + j) * det_exact(minor)


def make_unimodular(size: int, ops=None, seed=0, inject: str | None = None,
                    n_ops: int = 6, max_tries: int = 200, domain=None):
    """An integer matrix template with determinant ±1 everywhere.

    The constant part is the identity transformed by elementary operations
    (``ops`` if given, otherwise ``n_ops`` random ones drawn from ``seed``).
    With ``inject`` set to a parameter name, that parameter is added to one
    entry whose cofactor vanishes, so the determinant does not depend on it.
    The result is verified by exhaustive enumeration before it is returned.
    """
    from ..model import QuestionFamily
    from .checker import check_family
    from .constraints import MatrixUnimodular

    if size < 2:
        raise ValueError("size must be at least 2")
    rng = random.Random(seed)
    for _ in range(max_tries):
        m = [[int(r == c) for c in range(size)] for r in range(size)]
        for op in (ops if ops is not None else random_ops(size, n_ops, rng)):
            apply_op(m, op)
        template = [[_lit(v) for v in row] for row in m]
        if inject is not None:
            spots = [(i, j) for i in range(size) for j in range(size) if _cofactor(m, i, j) == 0]
            if not spots:
                if ops is not None:
                    raise ConstructionFailed("no entry of the given matrix has a vanishing cofactor")
                continue
            i, j = rng.choice(spots)
            base = m[i][j]
            template[i][j] = Param(inject) if base == 0 else BinOp("+", _lit(base), Param(inject))
        template = tuple(tuple(r) for r in template)
        fam = QuestionFamily(
            id=0, prompt=PromptTemplate(()), answer=Lit(0),
            constraints=(MatrixUnimodular("matrix_unimodular", {}, template),))
        if check_family(fam, domain).admissible:
            return template
        if ops is not None:
            break
    raise ConstructionFailed(f"no unimodular {size}x{size} template after {max_tries} attempts")


def template_strings(template) -> list:
    return [[serialise(e) for e in row] for row in template]
