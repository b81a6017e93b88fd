"""Abstract multi-agent scheduling: DAG instances with delays, exact makespan.

A task graph assigns each vertex a duration and each edge an optional
delay that must elapse between the predecessor finishing and the
successor starting.  A schedule maps every task to an agent and a start
clock.  The solver finds a provably minimal makespan by branch and
bound; a greedy list scheduler seeds the incumbent and serves as the
fallback when a time budget runs out.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from .engine import PlanError, _as_int
from .taskgen import stable_seed


class SchedError(Exception):
    pass


def _int_field(value, what: str) -> int:
    try:
        return _as_int(value, what)
    except PlanError as exc:
        raise SchedError(str(exc)) from None


# -- instance ------------------------------------------------------------------

@dataclass(frozen=True)
class AbstractTask:
    id: str
    t: int


@dataclass
class AbstractInstance:
    tasks: list[AbstractTask]
    edges: list[tuple[str, str, int]]  # (u, v, delay)
    agents: int
    setup: int = 0  # gap between consecutive tasks on one agent

    def check(self) -> None:
        if not self.tasks:
            raise SchedError("instance has no tasks")
        ids = [task.id for task in self.tasks]
        if len(set(ids)) != len(ids):
            raise SchedError("duplicate task ids")
        for task in self.tasks:
            if not isinstance(task.id, str) or not task.id:
                raise SchedError("task id must be a nonempty string")
            if not isinstance(task.t, int) or isinstance(task.t, bool) or task.t <= 0:
                raise SchedError(f"duration of {task.id!r} must be a positive int")
        known = set(ids)
        seen_edges = set()
        for u, v, d in self.edges:
            if u not in known or v not in known:
                raise SchedError(f"edge ({u!r}, {v!r}) references unknown task")
            if u == v:
                raise SchedError(f"self edge on {u!r}")
            if (u, v) in seen_edges:
                raise SchedError(f"duplicate edge ({u!r}, {v!r})")
            seen_edges.add((u, v))
            if not isinstance(d, int) or isinstance(d, bool) or d < 0:
                raise SchedError(f"delay on ({u!r}, {v!r}) must be a nonnegative int")
        if not isinstance(self.agents, int) or self.agents < 1:
            raise SchedError("agents must be a positive int")
        if not isinstance(self.setup, int) or self.setup < 0:
            raise SchedError("setup must be a nonnegative int")
        if self._topo_order() is None:
            raise SchedError("dependency graph has a cycle")

    def _topo_order(self) -> list[str] | None:
        """Kahn order of task ids, or None when the edges contain a cycle."""
        indeg = {task.id: 0 for task in self.tasks}
        out: dict[str, list[str]] = {task.id: [] for task in self.tasks}
        for u, v, _ in self.edges:
            out[u].append(v)
            indeg[v] += 1
        queue = [tid for tid in sorted(indeg) if indeg[tid] == 0]
        order = []
        while queue:
            tid = queue.pop(0)
            order.append(tid)
            for nxt in out[tid]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    queue.append(nxt)
        return order if len(order) == len(self.tasks) else None

    def durations(self) -> dict[str, int]:
        return {task.id: task.t for task in self.tasks}

    def to_json(self) -> dict:
        payload = {
            "tasks": [{"id": task.id, "t": task.t} for task in self.tasks],
            "edges": [{"u": u, "v": v, "d": d} for u, v, d in self.edges],
            "agents": self.agents,
        }
        if self.setup:
            payload["setup"] = self.setup
        return payload

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "AbstractInstance":
        if not isinstance(obj, dict):
            raise SchedError("instance must be a JSON object")
        raw_tasks = obj.get("tasks")
        if not isinstance(raw_tasks, list):
            raise SchedError("instance needs a 'tasks' list")
        tasks = []
        for entry in raw_tasks:
            if not isinstance(entry, dict) or "id" not in entry or "t" not in entry:
                raise SchedError("each task needs 'id' and 't'")
            tasks.append(AbstractTask(str(entry["id"]), _int_field(entry["t"], "task duration")))
        edges = []
        for entry in obj.get("edges", []):
            if not isinstance(entry, dict) or "u" not in entry or "v" not in entry:
                raise SchedError("each edge needs 'u' and 'v'")
            edges.append((str(entry["u"]), str(entry["v"]),
                          _int_field(entry.get("d", 0), "edge delay")))
        inst = cls(
            tasks=tasks,
            edges=edges,
            agents=_int_field(obj.get("agents"), "agents"),
            setup=_int_field(obj.get("setup", 0), "setup"),
        )
        inst.check()
        return inst

    @classmethod
    def loads(cls, text: str) -> "AbstractInstance":
        return cls.from_json(json.loads(text))


# -- schedule ------------------------------------------------------------------

@dataclass
class Schedule:
    assignment: dict[str, str]  # task id -> agent id
    start: dict[str, int]
    makespan: int

    def to_json(self) -> dict:
        return {
            "assignment": dict(sorted(self.assignment.items())),
            "start": dict(sorted(self.start.items())),
            "makespan": self.makespan,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "Schedule":
        if not isinstance(obj, dict):
            raise SchedError("schedule must be a JSON object")
        assignment = obj.get("assignment")
        start = obj.get("start")
        if not isinstance(assignment, dict) or not isinstance(start, dict):
            raise SchedError("schedule needs 'assignment' and 'start' objects")
        return cls(
            assignment={str(k): str(v) for k, v in assignment.items()},
            start={str(k): _int_field(v, f"start of {k!r}") for k, v in start.items()},
            makespan=_int_field(obj.get("makespan"), "makespan"),
        )


@dataclass(frozen=True)
class Validation:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate(inst: AbstractInstance, sched: Schedule) -> Validation:
    """Check a schedule against every instance constraint.

    Returns the first violated constraint.  A schedule that mentions a
    task the instance does not define is an error, not merely invalid.
    """
    known = {task.id for task in inst.tasks}
    for tid in list(sched.assignment) + list(sched.start):
        if tid not in known:
            raise SchedError(f"unknown task id {tid!r}")
    durations = inst.durations()
    agent_ids = {f"agent{k}" for k in range(1, inst.agents + 1)}
    for task in inst.tasks:
        if task.id not in sched.assignment or task.id not in sched.start:
            return Validation(False, f"unassigned-task:{task.id}")
    for tid, agent in sched.assignment.items():
        if agent not in agent_ids:
            return Validation(False, f"unknown-agent:{agent}")
    for tid, begin in sched.start.items():
        if begin < 0:
            return Validation(False, f"negative-start:{tid}")
    for u, v, d in inst.edges:
        if sched.start[v] < sched.start[u] + durations[u] + d:
            return Validation(False, f"precedence:{u}->{v}")
    by_agent: dict[str, list[str]] = {}
    for tid, agent in sched.assignment.items():
        by_agent.setdefault(agent, []).append(tid)
    for agent, tids in sorted(by_agent.items()):
        tids.sort(key=lambda tid: (sched.start[tid], tid))
        for prev, nxt in zip(tids, tids[1:]):
            if sched.start[nxt] < sched.start[prev] + durations[prev] + inst.setup:
                return Validation(False, f"agent-overlap:{prev}/{nxt}")
    computed = max(sched.start[tid] + durations[tid] for tid in durations)
    if sched.makespan != computed:
        return Validation(False, f"makespan-mismatch:{sched.makespan}!={computed}")
    return Validation(True)


def score_plan(inst: AbstractInstance, sched: Schedule | None,
               optimum: int) -> tuple[bool, float | None, float]:
    """Score a proposed schedule against the known optimum.

    Valid plans return (True, makespan / optimum, makespan).  Invalid or
    missing plans are failures and contribute exactly 1.2 x optimum to
    the penalized completion time.
    """
    if optimum <= 0:
        raise SchedError("optimum must be positive")
    if sched is not None:
        try:
            verdict = validate(inst, sched)
        except SchedError:
            verdict = Validation(False, "unknown-task")
        if verdict:
            return True, sched.makespan / optimum, float(sched.makespan)
    return False, None, 1.2 * optimum


# -- generation ----------------------------------------------------------------

@dataclass(frozen=True)
class InstanceProfile:
    """Named, versioned knobs for the random instance generator."""

    name: str
    version: int = 1
    n_tasks: tuple[int, int] = (8, 16)
    agents: tuple[int, ...] = (2, 3)
    duration: tuple[int, int] = (1, 10)
    density: float = 0.3
    delay_prob: float = 0.3
    delay: tuple[int, int] = (1, 5)
    layer_width: tuple[int, int] = (1, 4)


PROFILES = {
    "standard": InstanceProfile(name="standard"),
    "small": InstanceProfile(name="small", n_tasks=(2, 8), agents=(1, 2, 3)),
    "chain": InstanceProfile(name="chain", n_tasks=(4, 8), agents=(2,),
                             density=1.0, layer_width=(1, 1)),
}


def generate_instance(profile: InstanceProfile, seed: int) -> AbstractInstance:
    """Seeded random layered DAG; layering makes acyclicity structural."""
    lo, hi = profile.n_tasks
    if lo < 1 or hi < lo:
        raise SchedError(f"infeasible task range {profile.n_tasks}")
    if not profile.agents or min(profile.agents) < 1:
        raise SchedError("profile needs at least one agent count")
    rng = random.Random(stable_seed("sched", profile.name, profile.version, seed))
    n = rng.randint(lo, hi)
    agents = profile.agents[rng.randrange(len(profile.agents))]
    tasks = [AbstractTask(f"t{i + 1}", rng.randint(*profile.duration))
             for i in range(n)]
    layers: list[list[str]] = []
    remaining = n
    index = 0
    while remaining:
        width = min(remaining, rng.randint(*profile.layer_width))
        layers.append([tasks[index + k].id for k in range(width)])
        index += width
        remaining -= width
    edges: list[tuple[str, str, int]] = []
    for above, below in zip(layers, layers[1:]):
        for u in above:
            for v in below:
                if rng.random() < profile.density:
                    d = rng.randint(*profile.delay) if rng.random() < profile.delay_prob else 0
                    edges.append((u, v, d))
    inst = AbstractInstance(tasks=tasks, edges=edges, agents=agents)
    inst.check()
    return inst


# -- solver --------------------------------------------------------------------

@dataclass
class SolveResult:
    schedule: Schedule
    makespan: int
    optimal: bool
    nodes: int = 0

    def to_json(self) -> dict:
        payload = self.schedule.to_json()
        payload["optimal"] = self.optimal
        return payload


class _Budget(Exception):
    pass


class _Solver:
    """Branch and bound over (ready task, agent) placements.

    Every feasible combination of assignment plus per-agent order has an
    earliest-start schedule reachable by inserting tasks in a topological
    order of the combined precedence-plus-chain graph, so chronological
    placement at earliest start explores an optimal schedule.
    """

    CHECK_EVERY = 256

    def __init__(self, inst: AbstractInstance):
        inst.check()
        self.inst = inst
        self.ids = [task.id for task in inst.tasks]
        self.n = len(self.ids)
        self.m = inst.agents
        self.setup = inst.setup
        self.index = {tid: i for i, tid in enumerate(self.ids)}
        self.t = [task.t for task in inst.tasks]
        self.preds: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        self.succs: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, d in inst.edges:
            ui, vi = self.index[u], self.index[v]
            self.preds[vi].append((ui, d))
            self.succs[ui].append((vi, d))
        order = inst._topo_order()
        assert order is not None
        self.topo = [self.index[tid] for tid in order]
        # tail[v]: longest duration+delay path starting at v, inclusive
        self.tail = [0] * self.n
        for v in reversed(self.topo):
            down = max((d + self.tail[w] for w, d in self.succs[v]), default=0)
            self.tail[v] = self.t[v] + down

    # greedy seed: largest tail first, earliest-start agent

    def list_schedule(self) -> tuple[list[int], list[int], int]:
        finish = [0] * self.n
        assign = [0] * self.n
        starts = [0] * self.n
        agent_fin = [0] * self.m
        agent_used = [False] * self.m
        done = [False] * self.n
        indeg = [len(self.preds[v]) for v in range(self.n)]
        for _ in range(self.n):
            ready = [v for v in range(self.n) if not done[v] and indeg[v] == 0]
            v = max(ready, key=lambda x: (self.tail[x], -x))
            dag_ready = max((finish[u] + d for u, d in self.preds[v]), default=0)
            best = None
            for a in range(self.m):
                free = agent_fin[a] + (self.setup if agent_used[a] else 0)
                s = max(free, dag_ready)
                if best is None or s < best[0]:
                    best = (s, a)
            s, a = best
            starts[v] = s
            finish[v] = s + self.t[v]
            assign[v] = a
            agent_fin[a] = finish[v]
            agent_used[a] = True
            done[v] = True
            for w, _ in self.succs[v]:
                indeg[w] -= 1
        return assign, starts, max(finish)

    def solve(self, budget: float | None = None) -> SolveResult:
        assign, starts, best_make = self.list_schedule()
        self.best_assign = list(assign)
        self.best_starts = list(starts)
        self.best_make = best_make
        self.nodes = 0
        self.deadline = None if budget is None else time.monotonic() + budget
        self.memo: dict[int, list[tuple]] = {}
        optimal = True
        try:
            self._dfs(
                mask=0,
                finish=[0] * self.n,
                agent_fin=tuple([0] * self.m),
                agent_used=tuple([False] * self.m),
                assign=[0] * self.n,
                starts=[0] * self.n,
                makespan=0,
                indeg=[len(self.preds[v]) for v in range(self.n)],
            )
        except _Budget:
            optimal = False
        schedule = self._build(self.best_assign, self.best_starts, self.best_make)
        if optimal:
            cp = self._critical_path()
            serial = sum(self.t) + sum(d for _, _, d in self.inst.edges)
            serial += self.setup * (self.n - 1)
            assert cp <= self.best_make <= serial
        return SolveResult(schedule, self.best_make, optimal, self.nodes)

    def _critical_path(self) -> int:
        est = [0] * self.n
        for v in self.topo:
            est[v] = max((est[u] + self.t[u] + d for u, d in self.preds[v]), default=0)
        return max(est[v] + self.t[v] for v in range(self.n))

    def _build(self, assign: list[int], starts: list[int], makespan: int) -> Schedule:
        return Schedule(
            assignment={self.ids[v]: f"agent{assign[v] + 1}" for v in range(self.n)},
            start={self.ids[v]: starts[v] for v in range(self.n)},
            makespan=makespan,
        )

    def _dfs(self, mask, finish, agent_fin, agent_used, assign, starts,
             makespan, indeg):
        self.nodes += 1
        if self.deadline is not None and self.nodes % self.CHECK_EVERY == 0:
            if time.monotonic() > self.deadline:
                raise _Budget
        if mask == (1 << self.n) - 1:
            if makespan < self.best_make:
                self.best_make = makespan
                self.best_assign = list(assign)
                self.best_starts = list(starts)
            return
        if self._lower_bound(mask, finish, agent_fin, makespan) >= self.best_make:
            return
        if self._dominated(mask, finish, agent_fin, agent_used, makespan):
            return
        folded = [agent_fin[a] + (self.setup if agent_used[a] else 0)
                  for a in range(self.m)]
        candidates = []
        for v in range(self.n):
            if mask & (1 << v) or indeg[v]:
                continue
            dag_ready = max((finish[u] + d for u, d in self.preds[v]), default=0)
            seen_frees = set()
            for a in range(self.m):
                # agents with equal effective free time are interchangeable
                if folded[a] in seen_frees:
                    continue
                seen_frees.add(folded[a])
                s = max(folded[a], dag_ready)
                candidates.append((s, -self.tail[v], v, a))
        candidates.sort()
        for s, _, v, a in candidates:
            bit = 1 << v
            fin_v = s + self.t[v]
            finish[v] = fin_v
            assign[v] = a
            starts[v] = s
            for w, _ in self.succs[v]:
                indeg[w] -= 1
            next_fin = list(agent_fin)
            next_fin[a] = fin_v
            next_used = list(agent_used)
            next_used[a] = True
            self._dfs(mask | bit, finish, tuple(next_fin), tuple(next_used),
                      assign, starts, max(makespan, fin_v), indeg)
            for w, _ in self.succs[v]:
                indeg[w] += 1
        return

    def _lower_bound(self, mask, finish, agent_fin, makespan) -> int:
        rest = 0
        min_free = min(agent_fin)
        est = [0] * self.n
        path_bound = makespan
        for v in self.topo:
            if mask & (1 << v):
                continue
            rest += self.t[v]
            lo = min_free
            for u, d in self.preds[v]:
                if mask & (1 << u):
                    lo = max(lo, finish[u] + d)
                else:
                    lo = max(lo, est[u] + self.t[u] + d)
            est[v] = lo
            path_bound = max(path_bound, lo + self.tail[v])
        load_bound = -(-(sum(agent_fin) + rest) // self.m)
        return max(path_bound, load_bound)

    def _dominated(self, mask, finish, agent_fin, agent_used, makespan) -> bool:
        frees = tuple(sorted(agent_fin[a] + (self.setup if agent_used[a] else 0)
                             for a in range(self.m)))
        frontier = tuple(
            finish[v] for v in range(self.n)
            if mask & (1 << v) and any(not mask & (1 << w) for w, _ in self.succs[v])
        )
        entry = (frees, frontier, makespan)
        bucket = self.memo.setdefault(mask, [])
        for old in bucket:
            if (all(x <= y for x, y in zip(old[0], frees))
                    and all(x <= y for x, y in zip(old[1], frontier))
                    and old[2] <= makespan):
                return True
        bucket[:] = [old for old in bucket
                     if not (all(x <= y for x, y in zip(frees, old[0]))
                             and all(x <= y for x, y in zip(frontier, old[1]))
                             and makespan <= old[2])]
        bucket.append(entry)
        return False


def solve(inst: AbstractInstance, budget: float | None = None) -> SolveResult:
    return _Solver(inst).solve(budget)


def optimal_makespan(inst: AbstractInstance,
                     budget: float | None = None) -> tuple[Schedule, int]:
    result = solve(inst, budget)
    return result.schedule, result.makespan
