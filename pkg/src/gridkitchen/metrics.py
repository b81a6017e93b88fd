"""Correctness and efficiency metrics over run records.

All aggregates are pure functions of (record, t_max, d_max) triples and are
permutation-invariant. Ratios are stored raw (0..1 scale for SR, plain ratio
for nOCT/AU); any x100 presentation happens at the reporting layer, never in
files. nOCT and AU are undefined (None) when a record set has no successes,
matching the dash cells convention in result tables.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import RunRecord


class MetricsError(ValueError):
    pass


def _check(records: list[RunRecord]) -> None:
    if not records:
        raise MetricsError("empty record list")


def success_rate(records: list[RunRecord]) -> float:
    _check(records)
    return sum(1 for r in records if r.success) / len(records)


def poct(records: list[RunRecord], t_maxes: list[int]) -> float:
    """Mean completion time with failures penalized at their t_max."""
    _check(records)
    if len(t_maxes) != len(records):
        raise MetricsError("t_max list must align with records")
    total = 0.0
    for record, t_max in zip(records, t_maxes):
        if record.success:
            total += record.oct
        else:
            if t_max is None:
                raise MetricsError("failed record lacks t_max")
            total += t_max
    return total / len(records)


def noct(records: list[RunRecord], t_maxes: list[int]) -> float | None:
    """Mean OCT/t_max over successes; None when nothing succeeded."""
    _check(records)
    if len(t_maxes) != len(records):
        raise MetricsError("t_max list must align with records")
    ratios = [
        record.oct / t_max
        for record, t_max in zip(records, t_maxes)
        if record.success
    ]
    if not ratios:
        return None
    return sum(ratios) / len(ratios)


def task_md(record: RunRecord) -> float:
    """Mean travel distance across the record's agents."""
    if not record.per_agent:
        raise MetricsError("record has no agents")
    distances = [stats["distance"] for stats in record.per_agent.values()]
    return sum(distances) / len(distances)


def movement(records: list[RunRecord], d_maxes: list[int]) -> tuple[list[float], float]:
    """(MD of each success in order, pMD over all records)."""
    _check(records)
    if len(d_maxes) != len(records):
        raise MetricsError("d_max list must align with records")
    md_successes: list[float] = []
    total = 0.0
    for record, d_max in zip(records, d_maxes):
        if record.success:
            md = task_md(record)
            md_successes.append(md)
            total += md
        else:
            if d_max is None:
                raise MetricsError("failed record lacks d_max")
            total += d_max
    return md_successes, total / len(records)


def task_au(record: RunRecord) -> float:
    """Share of the episode each agent spent acting, averaged over agents.

    The denominator is the shared episode OCT for every agent, so idle crew
    members pull the average down.
    """
    if not record.per_agent:
        raise MetricsError("record has no agents")
    if record.oct <= 0:
        raise MetricsError("AU needs a positive OCT")
    shares = [stats["work_time"] / record.oct for stats in record.per_agent.values()]
    return sum(shares) / len(shares)


def agent_utilization(records: list[RunRecord]) -> float | None:
    """Mean task AU over successful records only; None without successes."""
    _check(records)
    values = [task_au(r) for r in records if r.success]
    if not values:
        return None
    return sum(values) / len(values)


@dataclass
class DatasetScore:
    sr: float
    poct: float
    noct: float | None
    pmd: float
    au: float | None
    n_total: int
    n_success: int

    def to_json(self) -> dict:
        return {
            "sr": self.sr,
            "poct": self.poct,
            "noct": self.noct,
            "pmd": self.pmd,
            "au": self.au,
            "n_total": self.n_total,
            "n_success": self.n_success,
        }


def score_records(records: list[RunRecord], t_maxes: list[int],
                  d_maxes: list[int]) -> DatasetScore:
    _check(records)
    _, pmd = movement(records, d_maxes)
    return DatasetScore(
        sr=success_rate(records),
        poct=poct(records, t_maxes),
        noct=noct(records, t_maxes),
        pmd=pmd,
        au=agent_utilization(records),
        n_total=len(records),
        n_success=sum(1 for r in records if r.success),
    )


GROUP_KEYS = ("model", "method", "difficulty", "n_agents", "n_dishes")


def score_result_rows(rows: list[dict], keys: tuple[str, ...] = GROUP_KEYS) -> dict:
    """Group harness/service result rows and score each group.

    Rows flagged infra_failure are dropped entirely (an API outage says
    nothing about the plan). Rows without a record (e.g. unparseable model
    output) count as plan failures. Returns {group_label: DatasetScore json}.
    """
    groups: dict[tuple, list[tuple[RunRecord, int, int]]] = {}
    for row in rows:
        if row.get("infra_failure"):
            continue
        key = tuple(row.get(k) for k in keys)
        record_json = row.get("record")
        if record_json is None:
            record = RunRecord(success=False, oct=0, per_agent={},
                               served=[], failure_reason="no-record", events=[])
        else:
            record = RunRecord.from_json(record_json)
        groups.setdefault(key, []).append((record, row.get("t_max"), row.get("d_max")))
    scored = {}
    for key in sorted(groups, key=lambda k: tuple(str(p) for p in k)):
        triples = groups[key]
        records = [t[0] for t in triples]
        t_maxes = [t[1] for t in triples]
        d_maxes = [t[2] for t in triples]
        label = "/".join(str(p) for p in key)
        scored[label] = score_records(records, t_maxes, d_maxes).to_json()
    return scored
