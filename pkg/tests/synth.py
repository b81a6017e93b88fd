"""Synthetic record sets shared by the metrics tests and the acceptance gate."""

from __future__ import annotations

import random

from gridkitchen.engine import RunRecord


def synth_records(n: int, seed: int) -> tuple[list[RunRecord], list[int], list[int]]:
    """Random plausible (record, t_max, d_max) triples.

    Successes respect the executor's timeout rule (oct <= t_max) and carry
    1..3 agents with work_time <= oct, mirroring real episodes.
    """
    rng = random.Random(seed)
    records, t_maxes, d_maxes = [], [], []
    for _ in range(n):
        success = rng.random() < 0.6
        oct_ = rng.randint(5, 500)
        t_max = oct_ * 3 if success else rng.randint(20, 1500)
        n_agents = rng.randint(1, 3)
        per_agent = {
            f"agent{j+1}": {
                "distance": rng.randint(0, 200),
                "work_time": rng.randint(1, oct_),
            }
            for j in range(n_agents)
        }
        records.append(RunRecord(
            success=success,
            oct=oct_,
            per_agent=per_agent,
            served=[],
            failure_reason=None if success else "timeout",
            events=[],
        ))
        t_maxes.append(t_max)
        d_maxes.append(rng.randint(50, 600))
    return records, t_maxes, d_maxes


def recompute_all(records, t_maxes, d_maxes) -> dict:
    """Independent one-line recomputations of every aggregate."""
    n = len(records)
    succ = [(r, t, d) for r, t, d in zip(records, t_maxes, d_maxes) if r.success]
    out = {
        "sr": len(succ) / n,
        "poct": sum(r.oct if r.success else t for r, t in zip(records, t_maxes)) / n,
        "pmd": sum(
            (sum(a["distance"] for a in r.per_agent.values()) / len(r.per_agent))
            if r.success else d
            for r, d in zip(records, d_maxes)
        ) / n,
        "noct": (sum(r.oct / t for r, t, _ in succ) / len(succ)) if succ else None,
        "au": (
            sum(
                sum(a["work_time"] / r.oct for a in r.per_agent.values()) / len(r.per_agent)
                for r, _, _ in succ
            ) / len(succ)
        ) if succ else None,
    }
    return out
