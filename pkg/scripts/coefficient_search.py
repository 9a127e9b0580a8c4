"""Smallest integrand coefficient that makes a double integral integer-valued.

For the triangle with legs g2 and g3, integrate c·(x + y) and report, for
c = 1, 2, ..., how many (g2, g3) points give a non-integer value.  The first
c with no failures is the smallest usable coefficient.

    python scripts/coefficient_search.py [--max-c 12]
"""
import argparse

from examforge.admissibility import integral_oracle

REGION = {"triangle": ["g2", "g3"]}


def failures(c):
    integrand = f"{c}*x + {c}*y"
    return sum(integral_oracle(integrand, REGION, {"g2": g2, "g3": g3}).denominator != 1
               for g2 in range(1, 10) for g3 in range(1, 10))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-c", type=int, default=12)
    args = ap.parse_args()
    smallest = None
    for c in range(1, args.max_c + 1):
        bad = failures(c)
        print(f"c = {c:2d}: {bad:2d} of 81 points give a non-integer integral")
        if bad == 0 and smallest is None:
            smallest = c
    print(f"smallest admissible coefficient: {smallest}")


if __name__ == "__main__":
    main()
