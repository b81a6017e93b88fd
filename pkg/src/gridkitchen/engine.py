"""Discrete-event kitchen simulator: actions, rules, deterministic records.

One KitchenSim instance is one episode. The same rule code drives batch plan
execution (all actions enqueued up front, first rejection fails the run) and
interactive play (actions submitted one at a time, rejections are non-fatal).

Timing model. Interact effects validate AND apply at action start, then hold
the agent busy for `interact` time units; a rejected Interact therefore leaves
both state and clock untouched. Process (chop, wash) validates at start, locks
the station via busy_by, and applies at completion. Serving applies its state
change at start but the served timestamp and success termination use the
completion clock, so the order completion time is never earlier than the last
Completed event.

Same-clock ordering is fixed: due environment events in schedule order, then
action completions by agent id, then action starts by agent id, cascading
until the instant is quiescent. Everything is integer time; replays are
byte-identical.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

from .recipes import RECIPE_INDEX, Recipe
from .world import (
    AgentState,
    BoundsError,
    Coord,
    GridMap,
    Item,
    OrderQueue,
    Station,
    TimeConstants,
)

ACTION_KINDS = ("MoveTo", "Interact", "Process", "Wait", "Finish")


class SimError(Exception):
    pass


class PlanError(SimError):
    """Plan JSON that does not satisfy the action schema."""


@dataclass(frozen=True)
class Action:
    kind: str
    target: tuple[int, int] | str | None = None
    duration: int | None = None

    def to_json(self) -> dict:
        if self.kind == "MoveTo":
            return {"action": "MoveTo", "target": list(self.target)}
        if self.kind in ("Interact", "Process"):
            return {"action": self.kind, "target": self.target}
        if self.kind == "Wait":
            return {"action": "Wait", "duration": self.duration}
        return {"action": "Finish"}


def _as_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise PlanError(f"{what} must be a number, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise PlanError(f"{what} must be an integer, got {value!r}")
        value = int(value)
    return value


def action_from_json(obj) -> Action:
    if not isinstance(obj, dict):
        raise PlanError(f"action must be an object, got {type(obj).__name__}")
    kind = obj.get("action")
    if kind not in ACTION_KINDS:
        raise PlanError(f"unknown action kind {kind!r}")
    if kind == "MoveTo":
        target = obj.get("target")
        if not isinstance(target, (list, tuple)) or len(target) != 2:
            raise PlanError(f"MoveTo target must be [x, y], got {target!r}")
        return Action("MoveTo", (_as_int(target[0], "MoveTo x"), _as_int(target[1], "MoveTo y")))
    if kind in ("Interact", "Process"):
        target = obj.get("target")
        if not isinstance(target, str) or not target:
            raise PlanError(f"{kind} target must be a station name, got {target!r}")
        return Action(kind, target)
    if kind == "Wait":
        duration = _as_int(obj.get("duration"), "Wait duration")
        if duration < 0:
            raise PlanError(f"Wait duration must be >= 0, got {duration}")
        return Action("Wait", duration=duration)
    return Action("Finish")


@dataclass
class Plan:
    """Per-agent action lists keyed by agent id ("agent1", ...)."""

    per_agent: dict[str, list[Action]]

    def to_json(self) -> dict:
        return {"plan": {aid: [a.to_json() for a in acts] for aid, acts in self.per_agent.items()}}

    @classmethod
    def from_json(cls, obj) -> Plan:
        if not isinstance(obj, dict):
            raise PlanError("plan payload must be an object")
        body = obj.get("plan", obj)
        if not isinstance(body, dict) or not body:
            raise PlanError("plan must map agent ids to action lists")
        per_agent: dict[str, list[Action]] = {}
        for aid, actions in body.items():
            if aid == "CoT":
                continue
            if not isinstance(actions, list):
                raise PlanError(f"actions for {aid!r} must be a list")
            per_agent[aid] = [action_from_json(a) for a in actions]
        if not per_agent:
            raise PlanError("plan has no agents")
        return cls(per_agent)


@dataclass(frozen=True)
class Event:
    clock: int
    agent: str
    action: Action
    outcome: str  # "started" | "completed" | "rejected"
    reason: str | None = None
    dish: str | None = None

    def to_json(self) -> dict:
        obj = {
            "clock": self.clock,
            "agent": self.agent,
            "action": self.action.to_json(),
            "outcome": self.outcome,
        }
        if self.reason is not None:
            obj["reason"] = self.reason
        if self.dish is not None:
            obj["dish"] = self.dish
        return obj


@dataclass
class RunRecord:
    """Deterministic outcome of one episode."""

    success: bool
    oct: int
    per_agent: dict[str, dict[str, int]]
    served: list[tuple[str, int]]
    failure_reason: str | None
    events: list[Event]

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "oct": self.oct,
            "per_agent": {aid: dict(stats) for aid, stats in sorted(self.per_agent.items())},
            "served": [[dish, clock] for dish, clock in self.served],
            "failure_reason": self.failure_reason,
            "events": [e.to_json() for e in self.events],
        }

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")).encode()

    @classmethod
    def from_json(cls, obj: dict) -> RunRecord:
        events = []
        for e in obj.get("events", []):
            events.append(Event(
                clock=e["clock"], agent=e["agent"],
                action=action_from_json(e["action"]),
                outcome=e["outcome"], reason=e.get("reason"), dish=e.get("dish"),
            ))
        return cls(
            success=obj["success"],
            oct=obj["oct"],
            per_agent={k: dict(v) for k, v in obj["per_agent"].items()},
            served=[(d, c) for d, c in obj["served"]],
            failure_reason=obj.get("failure_reason"),
            events=events,
        )


@dataclass
class _InFlight:
    action: Action
    done_at: int
    duration: int
    payload: dict = field(default_factory=dict)


class KitchenSim:
    """One kitchen episode over a GridMap, an order list, and time constants.

    t_max=None disables the timeout (used when deriving reference bounds).
    interactive=True makes rejections non-fatal and exposes submit().
    """

    def __init__(
        self,
        grid: GridMap,
        orders: list[str],
        constants: TimeConstants | None = None,
        t_max: int | None = None,
        interactive: bool = False,
        recipes: dict[str, Recipe] | None = None,
    ):
        self.constants = constants or TimeConstants()
        self.constants.validate()
        # Private copy: episodes mutate station contents.
        self.grid = GridMap.from_json(grid.to_json())
        self.recipes = recipes or RECIPE_INDEX
        for dish in orders:
            if dish not in self.recipes:
                raise SimError(f"unknown dish {dish!r} in orders")
        self.orders = OrderQueue(list(orders))
        self.t_max = t_max
        self.interactive = interactive

        self.agents: dict[str, AgentState] = {}
        for i, spawn in enumerate(self.grid.spawns, start=1):
            aid = f"agent{i}"
            self.agents[aid] = AgentState(agent_id=aid, pos=spawn)
        self._agent_order = sorted(self.agents)

        self.clock = 0
        self.events: list[Event] = []
        self.served: list[tuple[str, int]] = []
        self.outcome: tuple | None = None  # ("success",) | ("failure", reason)
        self._queues: dict[str, list[Action]] = {aid: [] for aid in self.agents}
        self._inflight: dict[str, _InFlight | None] = {aid: None for aid in self.agents}
        self._env: list[tuple[int, int, str, dict]] = []  # (time, seq, kind, data)
        self._env_seq = 0
        # stove name -> (event seq, session start clock) while cooking
        self._cooking: dict[str, tuple[int, int]] = {}
        returns = sorted(s.name for s in self.grid.stations if s.kind == "dirty_plate_return")
        self._return_station = returns[0] if returns else None

    # -- public state -------------------------------------------------------

    @property
    def over(self) -> bool:
        return self.outcome is not None

    @property
    def success(self) -> bool:
        return self.outcome is not None and self.outcome[0] == "success"

    def snapshot(self) -> dict:
        """JSON-able world state for services, UIs, and tests."""
        stations = []
        for s in self.grid.stations:
            entry = {
                "name": s.name,
                "kind": s.kind,
                "pos": list(s.pos),
                "contents": [c.to_json() for c in s.contents],
                "busy_by": s.busy_by,
            }
            if s.ingredient:
                entry["ingredient"] = s.ingredient
            if s.name in self._cooking:
                seq, _start = self._cooking[s.name]
                done = next(t for t, q, k, _ in self._env if q == seq)
                entry["cook_remaining"] = done - self.clock
            stations.append(entry)
        if self.outcome is None:
            status = "running"
        else:
            status = self.outcome[0]
        return {
            "clock": self.clock,
            "status": status,
            "failure_reason": self.outcome[1] if self.outcome and len(self.outcome) > 1 else None,
            "t_max": self.t_max,
            "width": self.grid.width,
            "height": self.grid.height,
            "orders": self.orders.to_json(),
            "served": [[d, c] for d, c in self.served],
            "agents": [self.agents[aid].to_json() for aid in self._agent_order],
            "stations": stations,
        }

    # -- batch execution ----------------------------------------------------

    def run_plan(self, plan: Plan) -> RunRecord:
        if self.interactive:
            raise SimError("run_plan requires a non-interactive sim")
        unknown = sorted(set(plan.per_agent) - set(self.agents))
        if unknown:
            self.outcome = ("failure", "malformed-plan")
            self.events.append(Event(0, unknown[0], Action("Finish"), "rejected", "unknown-agent"))
            return self._record()
        for aid, actions in plan.per_agent.items():
            self._queues[aid] = list(actions)
        self._advance(stop_on_decision=False)
        return self._record()

    def _record(self) -> RunRecord:
        per_agent = {
            aid: {"distance": a.distance, "work_time": a.work_time}
            for aid, a in self.agents.items()
        }
        return RunRecord(
            success=self.success,
            oct=self.clock,
            per_agent=per_agent,
            served=list(self.served),
            failure_reason=None if self.success else (self.outcome[1] if self.outcome else None),
            events=list(self.events),
        )

    # -- interactive driving -------------------------------------------------

    def submit(self, agent_id: str, action: Action) -> Event:
        """Start one action for an idle agent, then advance to the next
        decision point. Rejections return the Rejected event without moving
        the clock."""
        if not self.interactive:
            raise SimError("submit requires interactive mode")
        if self.over:
            raise SimError("episode is over")
        if agent_id not in self.agents:
            raise SimError(f"unknown agent {agent_id!r}")
        agent = self.agents[agent_id]
        if agent.finished:
            return self._reject(agent_id, action, "agent-finished")
        if self._inflight[agent_id] is not None:
            return self._reject(agent_id, action, "agent-busy")
        event = self._start(agent_id, action)
        if event.outcome == "rejected":
            return event
        self._advance(stop_on_decision=True)
        return event

    def needs_decision(self) -> list[str]:
        """Idle, unfinished agents awaiting an action, in id order."""
        return [
            aid for aid in self._agent_order
            if not self.agents[aid].finished and self._inflight[aid] is None
        ]

    def finalize(self, reason: str = "abandoned") -> RunRecord:
        """Close an interactive episode that did not finish on its own."""
        if self.outcome is None:
            self.outcome = ("failure", reason)
        return self._record()

    def legal_actions(self, agent_id: str) -> dict:
        """Dry-run the validators for the UI palette: station names this agent
        could Interact with / Process right now, from where it stands."""
        agent = self.agents[agent_id]
        interact, process = [], []
        if not agent.finished and self._inflight[agent_id] is None and not self.over:
            for station in self.grid.adjacent_stations(agent.pos):
                if station.busy_by is None and self._interact(agent, station, apply=False) is None:
                    interact.append(station.name)
                if self._process_check(station)[0] is None:
                    process.append(station.name)
        return {
            "interact": interact,
            "process": process,
            "wait": not agent.finished and not self.over,
            "finish": not agent.finished and not self.over,
        }

    # -- event loop ----------------------------------------------------------

    def _advance(self, stop_on_decision: bool) -> None:
        while not self.over:
            self._run_instant()
            if self.over:
                return
            if self._exhausted():
                self.outcome = ("failure", "exhausted")
                return
            if stop_on_decision and self.needs_decision():
                return
            nxt = self._next_time()
            if nxt is None:
                if not stop_on_decision:
                    self.outcome = ("failure", "exhausted")
                return
            if self.t_max is not None and nxt > self.t_max and not self._all_served():
                self.clock = self.t_max
                self.outcome = ("failure", "timeout")
                return
            self.clock = nxt

    def _run_instant(self) -> None:
        changed = True
        while changed and not self.over:
            changed = False
            while self._env and self._env[0][0] <= self.clock:
                _, seq, kind, data = heapq.heappop(self._env)
                self._fire_env(seq, kind, data)
                changed = True
            for aid in self._agent_order:
                inflight = self._inflight[aid]
                if inflight is not None and inflight.done_at <= self.clock:
                    self._complete(aid, inflight)
                    changed = True
                    if self.over:
                        return
            for aid in self._agent_order:
                if self.over:
                    return
                agent = self.agents[aid]
                if self._inflight[aid] is not None or not self._queues[aid]:
                    continue
                action = self._queues[aid].pop(0)
                event = self._start(aid, action)  # rejects queued-after-Finish too
                changed = True
                if event.outcome == "rejected":
                    # Batch mode: one illegal action fails the whole episode.
                    self.outcome = ("failure", "rejected-action")
                    return

    def _exhausted(self) -> bool:
        if self._all_served() or self.orders.complete:
            return False
        if self.interactive:
            return all(self.agents[aid].finished for aid in self._agent_order)
        if any(f is not None for f in self._inflight.values()):
            return False
        return all(not q for q in self._queues.values())

    def _all_served(self) -> bool:
        return len(self.served) == len(self.orders.dishes)

    def _next_time(self) -> int | None:
        times = [f.done_at for f in self._inflight.values() if f is not None]
        if self._env:
            times.append(self._env[0][0])
        return min(times) if times else None

    # -- action start / completion -------------------------------------------

    def _reject(self, aid: str, action: Action, reason: str) -> Event:
        event = Event(self.clock, aid, action, "rejected", reason)
        self.events.append(event)
        return event

    def _start(self, aid: str, action: Action) -> Event:
        agent = self.agents[aid]
        if agent.finished:
            return self._reject(aid, action, "agent-finished")
        payload: dict = {}

        if action.kind == "MoveTo":
            target = action.target
            try:
                if not self.grid.passable(target):
                    return self._reject(aid, action, "not-floor")
            except BoundsError:
                return self._reject(aid, action, "out-of-bounds")
            path = self.grid.shortest_path(agent.pos, target)
            if path is None:
                return self._reject(aid, action, "unreachable")
            tiles = len(path) - 1
            duration = tiles * self.constants.move_per_tile
            payload = {"target": target, "tiles": tiles}

        elif action.kind in ("Interact", "Process"):
            station = self.grid.by_name.get(action.target)
            if station is None:
                return self._reject(aid, action, "unknown-station")
            dx = abs(station.pos[0] - agent.pos[0])
            dy = abs(station.pos[1] - agent.pos[1])
            if dx + dy != 1:
                return self._reject(aid, action, "not-adjacent")
            if station.busy_by is not None:
                return self._reject(aid, action, "station-busy")
            if action.kind == "Interact":
                index_before = self.orders.next_index
                reason = self._interact(agent, station, apply=True)
                if reason is not None:
                    return self._reject(aid, action, reason)
                duration = self.constants.interact
                if self.orders.next_index != index_before:
                    payload = {"served": self.orders.dishes[index_before]}
            else:
                reason, duration = self._process_check(station)
                if reason is not None:
                    return self._reject(aid, action, reason)
                station.busy_by = aid
                payload = {"station": station.name}

        elif action.kind == "Wait":
            if action.duration is None or action.duration < 0:
                return self._reject(aid, action, "bad-duration")
            duration = action.duration

        elif action.kind == "Finish":
            agent.finished = True
            duration = 0

        else:
            return self._reject(aid, action, "unknown-action")

        agent.busy_until = self.clock + duration
        self._inflight[aid] = _InFlight(action, self.clock + duration, duration, payload)
        event = Event(self.clock, aid, action, "started")
        self.events.append(event)
        return event

    def _complete(self, aid: str, inflight: _InFlight) -> None:
        agent = self.agents[aid]
        action = inflight.action
        dish: str | None = None

        if action.kind == "MoveTo":
            agent.pos = tuple(inflight.payload["target"])
            agent.distance += inflight.payload["tiles"]
            agent.work_time += inflight.duration
        elif action.kind == "Interact":
            agent.work_time += inflight.duration
            if "served" in inflight.payload:
                dish = inflight.payload["served"]
                self.served.append((dish, self.clock))
        elif action.kind == "Process":
            station = self.grid.by_name[inflight.payload["station"]]
            self._apply_process(station)
            station.busy_by = None
            agent.work_time += inflight.duration
        # Wait and Finish complete without effects; idle time is not work.

        self._inflight[aid] = None
        self.events.append(Event(self.clock, aid, action, "completed", dish=dish))
        if dish is not None and self._all_served():
            self.outcome = ("success",)

    # -- interaction matrix ---------------------------------------------------

    def _interact(self, agent: AgentState, station: Station, apply: bool) -> str | None:
        """Validate (and with apply=True, perform) an item transfer.

        Returns a rejection reason or None. All transfers are instantaneous
        state changes; the interact duration only occupies the agent.
        """
        held = agent.holding

        if held is None:
            if station.kind == "dispenser":
                if apply:
                    agent.holding = Item(kind="ingredient", name=station.ingredient)
                return None
            if not station.contents:
                return "nothing-to-pick"
            if apply:
                item = station.contents.pop()
                self._on_removed(station, item)
                agent.holding = item
            return None

        if station.kind in ("dispenser", "dirty_plate_return"):
            return "hands-full"

        if station.kind == "serving_window":
            return self._serve(agent, held, apply)

        if station.kind == "stove":
            top = station.top
            if top is None:
                if held.is_cookware:
                    if apply:
                        self._place(agent, station)
                    return None
                return "stove-takes-cookware"
            if top.is_cookware:
                if held.is_ingredient and not held.cooked and not top.contents:
                    if apply:
                        top.contents.append(held)
                        agent.holding = None
                        self._maybe_start_cook(station)
                    return None
                if held.kind == "plate" and not held.dirty and self._pourable(top):
                    if apply:
                        self._pour(top, held)
                    return None
            return "bad-combination"

        if station.kind == "sink":
            if held.kind == "plate" and held.dirty:
                if apply:
                    self._place(agent, station)
                return None
            return "sink-takes-dirty-plates"

        if station.kind == "cutting_board":
            if station.contents:
                return "board-occupied"
            if held.is_ingredient and not held.cooked:
                if apply:
                    self._place(agent, station)
                return None
            return "board-takes-ingredients"

        if station.kind == "counter":
            top = station.top
            if top is None:
                if apply:
                    self._place(agent, station)
                return None
            if top.kind == "plate" and not top.dirty:
                if held.is_ingredient:
                    if apply:
                        top.contents.append(held)
                        agent.holding = None
                    return None
                if held.is_cookware and self._pourable(held):
                    if apply:
                        self._pour(held, top)
                    return None
                return "cannot-stack"
            if top.is_cookware:
                if held.is_ingredient and not held.cooked and not top.contents:
                    if apply:
                        top.contents.append(held)
                        agent.holding = None
                    return None
                if held.kind == "plate" and not held.dirty and self._pourable(top):
                    if apply:
                        self._pour(top, held)
                    return None
                return "cannot-stack"
            return "cannot-stack"

        return "bad-combination"

    def _serve(self, agent: AgentState, held: Item, apply: bool) -> str | None:
        if held.kind != "plate" or held.dirty:
            return "window-takes-plates"
        dish = self.orders.next_dish
        if dish is None:
            return "no-order"
        recipe = self.recipes[dish]
        plate_contents = tuple(sorted(c.prep() for c in held.contents))
        if plate_contents != recipe.required_plate():
            return "wrong-dish"
        if apply:
            agent.holding = None
            self.orders.next_index += 1
            if self._return_station is not None:
                delay = self.constants.dirty_plate_return
                self._schedule(self.clock + delay, "plate_return", {})
        return None

    @staticmethod
    def _pourable(cookware: Item) -> bool:
        return bool(cookware.contents) and all(c.cooked for c in cookware.contents)

    @staticmethod
    def _pour(cookware: Item, plate: Item) -> None:
        plate.contents.extend(cookware.contents)
        cookware.contents.clear()

    def _place(self, agent: AgentState, station: Station) -> None:
        item = agent.holding
        agent.holding = None
        station.contents.append(item)
        if station.kind == "stove" and item.is_cookware:
            self._maybe_start_cook(station)

    def _on_removed(self, station: Station, item: Item) -> None:
        if station.kind == "stove" and item.is_cookware:
            self._pause_cook(station, item)

    # -- cooking ---------------------------------------------------------------

    def _maybe_start_cook(self, stove: Station) -> None:
        cookware = stove.top
        if cookware is None or not cookware.is_cookware or not cookware.contents:
            return
        load = cookware.contents[0]
        if load.cooked:
            return
        remaining = self.constants.cook_time(cookware.kind) - load.cook_progress
        seq = self._schedule(self.clock + remaining, "cook_done", {"stove": stove.name})
        self._cooking[stove.name] = (seq, self.clock)

    def _pause_cook(self, stove: Station, cookware: Item) -> None:
        # Called after the cookware was popped off the stove; the load keeps
        # the time already spent so a later session resumes, not restarts.
        session = self._cooking.pop(stove.name, None)
        if session is None:
            return
        _seq, started = session
        cookware.contents[0].cook_progress += self.clock - started

    def _fire_env(self, seq: int, kind: str, data: dict) -> None:
        if kind == "cook_done":
            stove_name = data["stove"]
            session = self._cooking.get(stove_name)
            if session is None or session[0] != seq:
                return  # cancelled by a pause
            del self._cooking[stove_name]
            stove = self.grid.by_name[stove_name]
            cookware = stove.top
            load = cookware.contents[0]
            load.cooked_in = cookware.kind
            load.cook_progress = self.constants.cook_time(cookware.kind)
        elif kind == "plate_return":
            station = self.grid.by_name[self._return_station]
            station.contents.append(Item(kind="plate", dirty=True))

    def _schedule(self, time: int, kind: str, data: dict) -> int:
        self._env_seq += 1
        heapq.heappush(self._env, (time, self._env_seq, kind, data))
        return self._env_seq

    # -- processing --------------------------------------------------------------

    def _process_check(self, station: Station) -> tuple[str | None, int]:
        if station.busy_by is not None:
            return "station-busy", 0
        if station.kind == "cutting_board":
            top = station.top
            if top is None or not top.is_ingredient:
                return "nothing-to-chop", 0
            if top.chopped:
                return "already-chopped", 0
            return None, self.constants.cut
        if station.kind == "sink":
            if any(p.kind == "plate" and p.dirty for p in station.contents):
                return None, self.constants.wash_plate
            return "nothing-to-wash", 0
        return "cannot-process", 0

    def _apply_process(self, station: Station) -> None:
        if station.kind == "cutting_board":
            station.top.chopped = True
        else:
            for plate in reversed(station.contents):
                if plate.kind == "plate" and plate.dirty:
                    plate.dirty = False
                    break


def execute(grid: GridMap, orders: list[str], plan: Plan,
            constants: TimeConstants | None = None, t_max: int | None = None) -> RunRecord:
    """Run a complete plan against a fresh episode and return its record."""
    sim = KitchenSim(grid, orders, constants=constants, t_max=t_max)
    return sim.run_plan(plan)
