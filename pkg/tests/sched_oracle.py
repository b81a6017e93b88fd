"""Exhaustive reference for the exact scheduler, kept deliberately naive.

Enumerates every partition of tasks into at most m unlabeled agent
queues and every per-queue order compatible with dependency
reachability, then settles earliest starts by plain relaxation.  No
bounds, no pruning beyond reachability, no shared code with the solver.
"""

from __future__ import annotations

from itertools import product


def _reachability(ids, edges):
    adj = {u: [] for u in ids}
    for u, v, _ in edges:
        adj[u].append(v)
    reach = {}
    for root in ids:
        seen = set()
        stack = [root]
        while stack:
            node = stack.pop()
            for nxt in adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        reach[root] = seen
    return reach


def _set_partitions(items, max_blocks):
    blocks: list[list] = []

    def rec(i):
        if i == len(items):
            yield [tuple(b) for b in blocks]
            return
        for b in blocks:
            b.append(items[i])
            yield from rec(i + 1)
            b.pop()
        if len(blocks) < max_blocks:
            blocks.append([items[i]])
            yield from rec(i + 1)
            blocks.pop()

    yield from rec(0)


def _linear_extensions(block, reach):
    out = []
    block = list(block)

    def rec(prefix, remaining):
        if not remaining:
            out.append(tuple(prefix))
            return
        for x in remaining:
            if any(x in reach[y] for y in remaining if y != x):
                continue
            rec(prefix + [x], [y for y in remaining if y != x])

    rec([], block)
    return out


def _settle(orders, durations, edges, setup):
    """Earliest starts by relaxation; None when the combination deadlocks."""
    constraints = [(u, v, durations[u] + d) for u, v, d in edges]
    for queue in orders:
        for a, b in zip(queue, queue[1:]):
            constraints.append((a, b, durations[a] + setup))
    start = {tid: 0 for tid in durations}
    for _ in range(len(durations)):
        changed = False
        for u, v, w in constraints:
            if start[u] + w > start[v]:
                start[v] = start[u] + w
                changed = True
        if not changed:
            break
    for u, v, w in constraints:
        if start[u] + w > start[v]:
            return None  # cycle between queue order and dependencies
    return max(start[tid] + durations[tid] for tid in durations)


def brute_force_makespan(inst) -> int:
    ids = [task.id for task in inst.tasks]
    durations = {task.id: task.t for task in inst.tasks}
    reach = _reachability(ids, inst.edges)
    extensions: dict[tuple, list[tuple]] = {}

    def orders_for(block):
        if block not in extensions:
            extensions[block] = _linear_extensions(block, reach)
        return extensions[block]

    best = None
    for blocks in _set_partitions(ids, inst.agents):
        for combo in product(*[orders_for(b) for b in blocks]):
            mk = _settle(combo, durations, inst.edges, inst.setup)
            if mk is not None and (best is None or mk < best):
                best = mk
    assert best is not None
    return best


def audit_acyclic(ids, edges) -> bool:
    """Independent cycle check by repeated source removal."""
    remaining = set(ids)
    pairs = {(u, v) for u, v, _ in edges}
    while remaining:
        sources = [x for x in remaining
                   if not any(u in remaining and v == x for u, v in pairs)]
        if not sources:
            return False
        remaining -= set(sources)
    return True
