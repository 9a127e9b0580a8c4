"""Shared strategies and builders for the test suite."""
from hypothesis import strategies as st

from examforge.exprlang import PARAMS, BinOp, Lit, Neg, Param, Pow, eval_expr
from examforge.model import derive_params
from examforge.workbook import emit_xlsx, fill_answers


def exprs(max_depth=6):
    """Expression trees of depth at most ``max_depth``."""
    leaves = st.one_of(st.integers(0, 20).map(Lit), st.sampled_from(PARAMS).map(Param))
    if max_depth <= 1:
        return leaves
    sub = st.deferred(lambda: exprs(max_depth - 1))
    return st.one_of(
        leaves,
        sub.map(Neg),
        st.tuples(st.sampled_from("+-*"), sub, sub).map(lambda t: BinOp(*t)),
        st.tuples(sub, st.integers(0, 3)).map(lambda t: Pow(*t)),
    )


def depth(e):
    if isinstance(e, (Lit, Param)):
        return 1
    if isinstance(e, Neg):
        return 1 + depth(e.operand)
    if isinstance(e, Pow):
        return 1 + depth(e.base)
    return 1 + max(depth(e.left), depth(e.right))


envs = st.fixed_dictionaries({p: st.integers(1 if p[0] == "g" else 0, 9) for p in PARAMS})


def answer_key(spec, student):
    env = derive_params(student)
    return {f.id: eval_expr(f.answer, env) for f in spec.families}


def write_paper(paper, spec, student, path, answers=None, env=None, name=None):
    """Emit ``student``'s paper filled with ``answers`` (default: the key)."""
    env = env or derive_params(student)
    answers = answer_key(spec, student) if answers is None else answers
    model = fill_answers(paper, env, answers, student.name if name is None else name)
    return emit_xlsx(model, path)
