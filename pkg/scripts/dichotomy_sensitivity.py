#!/usr/bin/env python3
"""Repeat the dichotomy comparison over several path seeds on a shorter grid.

Diagnostic only: the golden run keeps its fixed seed. This shows how much the
verdicts depend on the particular pair of random Rauzy paths.
"""
import argparse
import json
from pathlib import Path

from ietlab.experiments.dichotomy import DichotomyConfig, dichotomy_run

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    ap.add_argument("--kmin", type=int, default=8)
    ap.add_argument("--kmax", type=int, default=14)
    ap.add_argument("--out", type=Path, default=ROOT / "tests" / "golden" / "dichotomy_seeds.json")
    args = ap.parse_args()
    rows = []
    for seed in args.seeds:
        r = dichotomy_run(DichotomyConfig(seed=seed, k_min=args.kmin, k_max=args.kmax))
        rot, non = r["arms"]["rotation"], r["arms"]["non_rotation"]
        row = {
            "seed": seed,
            "ordering": r["ordering"],
            "model_direction": r["model_direction"],
            "rotation_exponent": rot["fits"]["PowerLaw"]["exponent"],
            "rotation_preferred": rot["preferred"],
            "non_rotation_exponent": non["fits"]["PowerLaw"]["exponent"],
            "non_rotation_preferred": non["preferred"],
        }
        print(json.dumps(row), flush=True)
        rows.append(row)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({"k_min": args.kmin, "k_max": args.kmax, "rows": rows},
                                   indent=1) + "\n")


if __name__ == "__main__":
    main()
