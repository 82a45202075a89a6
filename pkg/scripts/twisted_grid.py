#!/usr/bin/env python3
"""Compare |Phi| with the contraction bound over an omega grid for good-word cores.

Prints, per permutation and depth, the largest ratio |Phi| / bound and the
number of grid points where the bound fails (expected: none).
"""
import argparse
from fractions import Fraction

import numpy as np

from ietlab.combinatorics import find_good_word
from ietlab.permutation import Permutation
from ietlab.twisted import mainbound, pi_n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--perms", nargs="+", default=["A B / B A", "A B C / C B A", "A B C D / D C B A"])
    ap.add_argument("--grid", type=int, default=200)
    ap.add_argument("--levels", type=int, default=3)
    args = ap.parse_args()
    for text in args.perms:
        gw = find_good_word(Permutation.parse(text))
        core = gw.substitution
        s = tuple(Fraction(k + 2, k + 3) for k in range(core.d))
        seq = [(core, core, core) if k % 2 else (core, core) for k in range(args.levels)]
        print(f"{text}: loop {gw.word}, {len(gw.good_words)} good return words")
        for N in range(1, args.levels + 1):
            flat = [z for f in seq[:N] for z in f]
            ratios = []
            for j in range(args.grid):
                om = Fraction(2 * j + 1, 2 * args.grid)
                mb = mainbound(seq, core, s, om, N)
                ratios.append(float(np.abs(pi_n(flat, s, om)).max()) / mb.value)
            bad = sum(r > 1 for r in ratios)
            print(f"  N={N}: max ratio {max(ratios):.4f}, violations {bad}/{args.grid}")


if __name__ == "__main__":
    main()
