#!/usr/bin/env python3
"""Generate a full evaluation suite of kitchen task bundles.

Writes one bundle JSON per (category, dishes, agents, seed) cell plus a
manifest listing every file with its difficulty labels and budgets.

Usage:
    python3 scripts/make_kitchen_suite.py --out suite/ --seeds 5
"""

from __future__ import annotations

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gridkitchen.recipes import CATEGORIES
from gridkitchen.taskgen import assemble_bundle


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--seeds", type=int, default=5, help="seeds per cell")
    ap.add_argument("--dishes", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--agents", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--categories", nargs="+", default=sorted(CATEGORIES))
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    manifest = []
    for category in args.categories:
        if category not in CATEGORIES:
            ap.error(f"unknown category {category!r}")
        for dishes in args.dishes:
            for agents in args.agents:
                for seed in range(args.seeds):
                    bundle = assemble_bundle(category, dishes, agents, seed)
                    name = f"{bundle.bundle_id}.json"
                    with open(os.path.join(args.out, name), "w") as fh:
                        json.dump(bundle.to_json(), fh, sort_keys=True, indent=2)
                        fh.write("\n")
                    manifest.append({
                        "file": name,
                        "bundle_id": bundle.bundle_id,
                        "category": category,
                        "n_dishes": dishes,
                        "n_agents": agents,
                        "seed": seed,
                        "difficulty": bundle.difficulty,
                        "t_max": bundle.t_max,
                        "d_max": bundle.d_max,
                    })
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"{len(manifest)} bundles -> {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
