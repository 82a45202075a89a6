#!/usr/bin/env python3
"""Build lower-bound certificates for the golden three-interval fixture and print them."""
import argparse
import time

from ietlab.errors import NoGapFound, TooSmallN
from ietlab.experiments import lower_bound_construct, rotation_representation
from ietlab.fixtures import three_reversal_golden


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[2 ** 10, 2 ** 12, 2 ** 14])
    ap.add_argument("--eps", type=float, default=0.1)
    args = ap.parse_args()
    rep = rotation_representation(three_reversal_golden())
    print(f"base a={rep.a} theta~{float(rep.theta):.12f} roof={rep.roof} path={rep.path}")
    for N in args.N:
        t0 = time.time()
        try:
            c = lower_bound_construct(rep, N, eps=args.eps)
        except (TooSmallN, NoGapFound) as exc:
            print(f"N={N}: {type(exc).__name__}: {exc}")
            continue
        print(f"N={N} s={float(c.s):.3e} C={c.C:.3f} A={c.A:.3f} #S={len(c.S)} "
              f"|H|={float(c.H_measure):.4f} ratio={float(c.ratio):.3g} "
              f"checks={c.checks} ({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
