"""Scripted reference solver: builds feasible plans by driving the engine.

A central planner steps an interactive episode, one agent decision at a time,
and records every submitted action; the recorded per-agent streams are the
returned Plan. Each action is pre-validated against live state in the same
planner step that emits it, so golden plans replay without a single Rejected
event, and batch replay reproduces the interactive run exactly (both modes
share the engine's deterministic same-clock ordering).

Workload split: dishes round-robin over at most two workers (maps stock two
assembly counters); extra agents finish immediately. Worker 1 assembles on
the plate-stocked counter, other workers grab their plate from that stack
first, and worker 1 defers its first plating until those grabs happened.
Dishes beyond the stocked plates reuse returned dirty plates via the sink.
"""

from __future__ import annotations

from .engine import Action, KitchenSim, Plan, SimError
from .recipes import Recipe
from .world import GridMap, Station, TimeConstants

# An episode clock beyond this means the planner wedged; golden runs of the
# supported task sizes finish in a few hundred units.
SAFETY_CLOCK = 200_000


class SolverError(SimError):
    pass


def golden_plan(grid: GridMap, orders: list[str],
                constants: TimeConstants | None = None) -> Plan:
    """Produce a feasible plan for the given kitchen and order list."""
    sim = KitchenSim(grid, orders, constants=constants, t_max=None, interactive=True)
    return _Planner(sim).run()


def reference_run(grid: GridMap, orders: list[str],
                  constants: TimeConstants | None = None):
    """Solve and replay in batch mode; returns (plan, record)."""
    from .engine import execute

    plan = golden_plan(grid, orders, constants=constants)
    record = execute(grid, orders, plan, constants=constants, t_max=None)
    if not record.success:
        raise SolverError("golden plan failed on batch replay")
    return plan, record


class _Planner:
    def __init__(self, sim: KitchenSim):
        self.sim = sim
        self.grid = sim.grid
        counters = sorted(s.name for s in self.grid.stations if s.kind == "counter")
        if not counters:
            raise SolverError("kitchen has no counters to assemble on")
        plate_counters = [
            n for n in counters
            if any(i.kind == "plate" and not i.dirty for i in self.grid.by_name[n].contents)
        ]
        self.plate_counter = plate_counters[0] if plate_counters else counters[0]
        others = [n for n in counters if n != self.plate_counter]
        agent_ids = sorted(sim.agents)
        n_workers = min(len(agent_ids), 1 + len(others), 2)
        self.workers = agent_ids[:n_workers]
        self.assembly = {self.workers[0]: self.plate_counter}
        for w, counter in zip(self.workers[1:], others):
            self.assembly[w] = counter
        self.dishes: dict[str, list[tuple[int, str]]] = {aid: [] for aid in agent_ids}
        for idx, dish in enumerate(sim.orders.dishes):
            self.dishes[self.workers[idx % n_workers]].append((idx, dish))
        # Non-owner workers with a first dish must take a stocked plate before
        # the owner buries the stack top under its own ingredients.
        self.stack_pending = {
            w for w in self.workers[1:] if self.dishes[w]
        }
        stack = self.grid.by_name[self.plate_counter]
        initial_plates = sum(
            1 for i in stack.contents if i.kind == "plate" and not i.dirty
        )
        self.owner_stocked = initial_plates - len(self.stack_pending)
        self.scripts = {aid: self._script(aid) for aid in agent_ids}
        self.recorded: dict[str, list[Action]] = {aid: [] for aid in agent_ids}

    def run(self) -> Plan:
        sim = self.sim
        while not sim.over:
            idle = sim.needs_decision()
            if not idle:
                raise SolverError("engine stalled without a decision point")
            aid = idle[0]
            action = next(self.scripts[aid])
            event = sim.submit(aid, action)
            if event.outcome == "rejected":
                raise SolverError(
                    f"planner submitted illegal action for {aid}: "
                    f"{action.to_json()} -> {event.reason} at t={sim.clock}"
                )
            self.recorded[aid].append(action)
            if sim.clock > SAFETY_CLOCK:
                raise SolverError("planner exceeded safety clock")
        if not sim.success:
            raise SolverError(f"episode failed during planning: {sim.outcome}")
        return Plan({aid: acts for aid, acts in self.recorded.items() if acts})

    # -- geometry helpers ----------------------------------------------------

    def _pos(self, aid: str):
        return self.sim.agents[aid].pos

    def _path_cost(self, aid: str, cell) -> int | None:
        return self.grid.path_tiles(self._pos(aid), cell)

    def _best_adjacent(self, aid: str, station: Station):
        """Cheapest reachable floor cell adjacent to station, NESW tie-break."""
        best = None
        for i, cell in enumerate(self.grid.adjacent_floor(station)):
            cost = self._path_cost(aid, cell)
            if cost is None:
                continue
            key = (cost, i)
            if best is None or key < best[0]:
                best = (key, cell)
        return None if best is None else best[1]

    def _nearest(self, aid: str, stations: list[Station]) -> Station | None:
        best = None
        for s in sorted(stations, key=lambda s: s.name):
            cell = self._best_adjacent(aid, s)
            if cell is None:
                continue
            cost = self._path_cost(aid, cell)
            key = (cost, s.name)
            if best is None or key < best[0]:
                best = (key, s)
        return None if best is None else best[1]

    def _goto(self, aid: str, station: Station):
        """Yield the MoveTo reaching a cell adjacent to station, if needed."""
        station_pos = station.pos
        pos = self._pos(aid)
        if abs(pos[0] - station_pos[0]) + abs(pos[1] - station_pos[1]) == 1:
            return
        cell = self._best_adjacent(aid, station)
        if cell is None:
            raise SolverError(f"{station.name} unreachable for {aid}")
        yield Action("MoveTo", cell)

    def _stations(self, kind: str) -> list[Station]:
        return [s for s in self.grid.stations if s.kind == kind]

    # -- scripts ---------------------------------------------------------------

    def _script(self, aid: str):
        wait = Action("Wait", duration=1)
        my_dishes = self.dishes[aid]
        if not my_dishes:
            yield Action("Finish")
            return
        recipes = self.sim.recipes
        assembly = self.grid.by_name[self.assembly[aid]]
        is_owner = aid == self.workers[0]

        # Phase 0 for non-owners: claim a stocked plate and park it on our
        # own assembly counter.
        if not is_owner:
            stack = self.grid.by_name[self.plate_counter]
            yield from self._goto(aid, stack)
            top = stack.top
            if top is None or top.kind != "plate" or top.dirty:
                raise SolverError("stocked plate missing for worker grab")
            self.stack_pending.discard(aid)
            yield Action("Interact", stack.name)  # pick plate
            yield from self._goto(aid, assembly)
            while assembly.top is not None:
                yield wait
            yield Action("Interact", assembly.name)  # park plate

        for dish_number, (order_idx, dish_id) in enumerate(my_dishes):
            recipe = recipes[dish_id]
            own_stocked_plate = is_owner and dish_number < self.owner_stocked
            grabbed_plate = (not is_owner) and dish_number == 0
            if not (own_stocked_plate or grabbed_plate):
                yield from self._acquire_clean_plate(aid, assembly)
            yield from self._prepare_ingredients(aid, recipe, assembly, is_owner)
            yield from self._serve(aid, assembly, order_idx)
        yield Action("Finish")

    def _acquire_clean_plate(self, aid: str, assembly: Station):
        """Wait for a dirty plate at the return chute, wash it, park it."""
        wait = Action("Wait", duration=1)
        chute = self.grid.by_name[self.sim._return_station]
        yield from self._goto(aid, chute)
        while True:
            top = chute.top
            if top is not None and top.kind == "plate" and top.dirty:
                yield Action("Interact", chute.name)  # pick dirty plate
                break
            yield wait
        while True:
            sinks = [s for s in self._stations("sink") if s.busy_by is None]
            sink = self._nearest(aid, sinks)
            if sink is None:
                yield wait
                continue
            yield from self._goto(aid, sink)
            if sink.busy_by is not None:
                continue
            yield Action("Interact", sink.name)  # place dirty plate
            break
        while True:
            if sink.busy_by is not None:
                yield wait
                continue
            top = sink.top
            if top is not None and top.kind == "plate" and not top.dirty:
                yield Action("Interact", sink.name)  # pick clean plate
                break
            if top is not None and top.kind == "plate" and top.dirty:
                yield Action("Process", sink.name)
                continue
            raise SolverError("sink lost our plate")
        yield from self._goto(aid, assembly)
        while assembly.top is not None:
            yield wait
        yield Action("Interact", assembly.name)  # park clean plate

    def _prepare_ingredients(self, aid: str, recipe: Recipe, assembly: Station,
                             is_owner: bool):
        for spec in recipe.ingredients:
            yield from self._fetch(aid, spec.name)
            if spec.chopped:
                yield from self._chop(aid)
            if spec.cooked_in is not None:
                yield from self._cook_and_pour(aid, spec.cooked_in, assembly, is_owner)
            else:
                yield from self._plate_held(aid, assembly, is_owner)

    def _fetch(self, aid: str, ingredient: str):
        dispensers = [s for s in self._stations("dispenser") if s.ingredient == ingredient]
        station = self._nearest(aid, dispensers)
        if station is None:
            raise SolverError(f"no dispenser for {ingredient}")
        yield from self._goto(aid, station)
        yield Action("Interact", station.name)

    def _chop(self, aid: str):
        wait = Action("Wait", duration=1)
        while True:
            boards = [
                s for s in self._stations("cutting_board")
                if s.busy_by is None and not s.contents
            ]
            board = self._nearest(aid, boards)
            if board is None:
                yield wait
                continue
            yield from self._goto(aid, board)
            if board.busy_by is not None or board.contents:
                continue  # lost the race while walking; re-pick
            yield Action("Interact", board.name)  # place
            break
        yield Action("Process", board.name)
        yield Action("Interact", board.name)  # pick chopped

    def _cook_and_pour(self, aid: str, vessel: str, assembly: Station, is_owner: bool):
        wait = Action("Wait", duration=1)
        while True:
            stoves = [
                s for s in self._stations("stove")
                if s.busy_by is None and s.top is not None
                and s.top.kind == vessel and not s.top.contents
            ]
            stove = self._nearest(aid, stoves)
            if stove is None:
                yield wait
                continue
            yield from self._goto(aid, stove)
            if stove.top is None or stove.top.kind != vessel or stove.top.contents:
                continue
            load = self.sim.agents[aid].holding
            yield Action("Interact", stove.name)  # load; cooking starts now
            break
        while not load.cooked:
            yield wait
        yield Action("Interact", stove.name)  # pick cookware with cooked food
        yield from self._goto(aid, assembly)
        yield from self._gate_first_plating(aid, assembly, is_owner)
        yield Action("Interact", assembly.name)  # pour onto plate
        yield from self._goto(aid, stove)
        yield Action("Interact", stove.name)  # return empty cookware

    def _plate_held(self, aid: str, assembly: Station, is_owner: bool):
        yield from self._goto(aid, assembly)
        yield from self._gate_first_plating(aid, assembly, is_owner)
        yield Action("Interact", assembly.name)

    def _gate_first_plating(self, aid: str, assembly: Station, is_owner: bool):
        wait = Action("Wait", duration=1)
        if is_owner:
            while self.stack_pending:
                yield wait
        top = assembly.top
        if top is None or top.kind != "plate" or top.dirty:
            raise SolverError(f"assembly counter {assembly.name} lost its plate")

    def _serve(self, aid: str, assembly: Station, order_idx: int):
        wait = Action("Wait", duration=1)
        yield from self._goto(aid, assembly)
        yield Action("Interact", assembly.name)  # pick the finished plate
        window = self._nearest(aid, self._stations("serving_window"))
        if window is None:
            raise SolverError("no serving window")
        yield from self._goto(aid, window)
        while self.sim.orders.next_index < order_idx:
            yield wait
        yield Action("Interact", window.name)
