"""Design integer matrix templates whose determinant is ±1 for every code.

Starts from the identity, applies random elementary operations, then adds a
parameter to an entry whose cofactor vanishes, so the determinant cannot
depend on it.  Each template is verified exhaustively before it is printed,
together with the inverse at a few parameter values.

    python scripts/unimodular_design.py [--size 3] [--param g2] [--count 3] [--seed 0]
"""
import argparse

from examforge.admissibility import det_exact, inverse_exact
from examforge.admissibility.unimodular import make_unimodular, template_strings
from examforge.exprlang import eval_expr


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=3)
    ap.add_argument("--param", default="g2")
    ap.add_argument("--count", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for k in range(args.count):
        t = make_unimodular(args.size, seed=args.seed + k, inject=args.param)
        print(f"template {k + 1}:")
        for row in template_strings(t):
            print("   [ " + "  ".join(f"{e:>8}" for e in row) + " ]")
        for v in (1, 5, 9):
            m = [[eval_expr(e, {args.param: v}) for e in row] for row in t]
            inv = inverse_exact(m)
            shown = "; ".join(" ".join(str(x) for x in r) for r in inv)
            print(f"   {args.param}={v}: det={det_exact(m)}  inverse=[{shown}]")


if __name__ == "__main__":
    main()
