#!/usr/bin/env python3
"""Generate abstract scheduling instances together with oracle solutions.

Each instance file gets a sibling .solution.json holding the reference
schedule, its makespan, and whether the solver proved optimality.

Usage:
    python3 scripts/make_sched_suite.py --out sched_suite/ --count 50
"""

from __future__ import annotations

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gridkitchen.sched import PROFILES, generate_instance, solve


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--count", type=int, default=50, help="instances per profile")
    ap.add_argument("--profiles", nargs="+", default=["standard"],
                    choices=sorted(PROFILES))
    ap.add_argument("--budget", type=float, default=None,
                    help="per-instance solver budget in seconds")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    written = 0
    unproven = 0
    for profile in args.profiles:
        for seed in range(args.count):
            inst = generate_instance(PROFILES[profile], seed)
            result = solve(inst, budget=args.budget)
            stem = f"{profile}_s{seed:04d}"
            with open(os.path.join(args.out, f"{stem}.json"), "w") as fh:
                json.dump(inst.to_json(), fh, sort_keys=True, indent=2)
                fh.write("\n")
            with open(os.path.join(args.out, f"{stem}.solution.json"), "w") as fh:
                json.dump(result.to_json(), fh, sort_keys=True, indent=2)
                fh.write("\n")
            written += 1
            unproven += 0 if result.optimal else 1
    note = "" if not unproven else f" ({unproven} not proven optimal)"
    print(f"{written} instances -> {args.out}{note}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
