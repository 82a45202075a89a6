#!/usr/bin/env python3
"""Run the default dichotomy experiment and store it as golden data.

The output (default tests/golden/dichotomy.json) is what the acceptance suite
checks against; a prefix of both series is recomputed there.
"""
import argparse
import json
import time
from pathlib import Path

from ietlab.experiments.dichotomy import DichotomyConfig, dichotomy_run
from ietlab.io import to_jsonable

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "tests" / "golden" / "dichotomy.json")
    ap.add_argument("--kmin", type=int, default=8)
    ap.add_argument("--kmax", type=int, default=16)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    t0 = time.time()
    report = dichotomy_run(DichotomyConfig(seed=args.seed, k_min=args.kmin, k_max=args.kmax))
    report["config"].pop("workers", None)    # machine setting, not part of the result
    report["seconds"] = round(time.time() - t0, 1)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(to_jsonable(report), indent=1, sort_keys=True) + "\n")
    for key, arm in report["arms"].items():
        fits = {m: round(f["exponent"], 4) for m, f in arm["fits"].items()}
        print(f"{key:13s} {arm['fixture']:13s} preferred={arm['preferred']:9s} exponents={fits}")
    print(f"ordering={report['ordering']} model_direction={report['model_direction']}")
    print(report["statement"])


if __name__ == "__main__":
    main()
