"""Engine semantics: the hand-traced golden run, action rules, determinism.

The frozen numbers in test_salad_golden_trace were derived by hand before the
engine existed:

  spawn (1,1), constants interact=1 cut=3 move_per_tile=1
  t0  Interact(lettuce_dispenser1)  -> holding raw lettuce       (t=1)
  t1  MoveTo (3,1)   2 tiles                                     (t=3)
  t3  Interact(cutting_board1)      -> lettuce on board          (t=4)
  t4  Process(cutting_board1)       -> chopping, 3 units         (t=7)
  t7  Interact(cutting_board1)      -> holding chopped lettuce   (t=8)
  t8  MoveTo (5,1)   2 tiles                                     (t=10)
  t10 Interact(counter1)            -> lettuce onto clean plate  (t=11)
  t11 Interact(counter1)            -> pick up plated salad      (t=12)
  t12 MoveTo (5,3)   2 tiles                                     (t=14)
  t14 Interact(serving_window1)     -> serve salad_basic         (t=15)

  OCT = 15, distance = 6, work_time = 6 moves + 6 interacts + 3 cut = 15.
"""

from __future__ import annotations

import pytest

from gridkitchen.engine import (
    Action,
    Event,
    KitchenSim,
    Plan,
    PlanError,
    RunRecord,
    action_from_json,
    execute,
)
from gridkitchen.world import GridMap, Item, Station, TimeConstants

from conftest import cook_kitchen, salad_kitchen


def acts(*specs) -> list[Action]:
    out = []
    for s in specs:
        if s[0] == "move":
            out.append(Action("MoveTo", (s[1], s[2])))
        elif s[0] == "wait":
            out.append(Action("Wait", duration=s[1]))
        elif s[0] == "finish":
            out.append(Action("Finish"))
        else:
            out.append(Action({"i": "Interact", "p": "Process"}[s[0]], s[1]))
    return out


SALAD_ACTIONS = acts(
    ("i", "lettuce_dispenser1"),
    ("move", 3, 1),
    ("i", "cutting_board1"),
    ("p", "cutting_board1"),
    ("i", "cutting_board1"),
    ("move", 5, 1),
    ("i", "counter1"),
    ("i", "counter1"),
    ("move", 5, 3),
    ("i", "serving_window1"),
)


def test_salad_golden_trace():
    record = execute(salad_kitchen(), ["salad_basic"], Plan({"agent1": SALAD_ACTIONS}))
    assert record.success
    assert record.oct == 15
    assert record.served == [("salad_basic", 15)]
    assert record.per_agent["agent1"] == {"distance": 6, "work_time": 15}
    assert record.failure_reason is None
    completed = [e for e in record.events if e.outcome == "completed"]
    assert completed[-1].dish == "salad_basic"
    assert record.oct >= max(e.clock for e in completed)


def test_replay_is_byte_identical():
    plan = Plan({"agent1": SALAD_ACTIONS})
    a = execute(salad_kitchen(), ["salad_basic"], plan).canonical_bytes()
    b = execute(salad_kitchen(), ["salad_basic"], plan).canonical_bytes()
    assert a == b
    assert RunRecord.from_json(
        __import__("json").loads(a)
    ).canonical_bytes() == a


def test_events_are_clock_ordered_and_attributed():
    record = execute(salad_kitchen(), ["salad_basic"], Plan({"agent1": SALAD_ACTIONS}))
    clocks = [e.clock for e in record.events]
    assert clocks == sorted(clocks)
    assert {e.agent for e in record.events} == {"agent1"}
    # Every completed event was started earlier at completion - duration.
    starts = [(e.clock, e.action) for e in record.events if e.outcome == "started"]
    assert len(starts) == len(SALAD_ACTIONS)


# ---------------------------------------------------------------------------
# Cooking: session start, pause keeps progress, resume finishes the rest.
# ---------------------------------------------------------------------------

def cook_prefix() -> list[Action]:
    # Ends with the load interact applying at t=10: cook session starts t=10.
    return acts(
        ("i", "meat_dispenser1"),     # t0 -> 1
        ("move", 3, 1),               # t1 -> 3
        ("i", "cutting_board1"),      # t3 -> 4
        ("p", "cutting_board1"),      # t4 -> 7
        ("i", "cutting_board1"),      # t7 -> 8
        ("move", 5, 1),               # t8 -> 10
        ("i", "stove1"),              # t10 -> 11, meat into pan, cook 6 started
    )


def test_cook_pause_resume_exact():
    # Pause at 50%: pan_cook=6, pick the pan up 3 units into the session.
    plan = Plan({"agent1": cook_prefix() + acts(
        ("wait", 2),        # t11 -> 13
        ("i", "stove1"),    # t13: pick pan, progress = 13-10 = 3 (50%)
        ("i", "stove1"),    # t14: put pan back, remaining 3 -> done at t17
        ("wait", 5),        # t15 -> 20, cook_done fires at exactly 17
        ("finish",),
    )})
    sim = KitchenSim(cook_kitchen(), ["burger_basic"])
    record = sim.run_plan(plan)
    assert record.failure_reason == "exhausted"  # burger never assembled
    pan = sim.grid.by_name["stove1"].contents[0]
    meat = pan.contents[0]
    assert meat.cooked_in == "pan"
    assert meat.cook_progress == 6
    # The done event fired at 10 + 3 (first half) + 1 (handling) + 3 (rest):
    # session resumed at t14 with 3 remaining -> cooked at t17, not t16/t18.
    snap_done = [e for e in record.events if e.outcome == "completed"]
    assert snap_done[-1].clock == 20


def test_cook_progress_survives_counter_detour():
    plan = Plan({"agent1": cook_prefix() + acts(
        ("wait", 1),          # t11 -> 12
        ("i", "stove1"),      # t12: pick pan, progress 2
        ("move", 1, 3),       # t13 -> 18 (5 tiles)
        ("i", "counter1"),    # t18: plate occupies counter top? no: pan cannot stack on plate
    )})
    # Placing cookware onto a plate-topped counter is illegal: expect failure.
    record = execute(cook_kitchen(), ["burger_basic"], plan)
    assert not record.success
    assert record.failure_reason == "rejected-action"
    rej = [e for e in record.events if e.outcome == "rejected"]
    assert rej[0].reason == "cannot-stack"


def test_cooked_food_pours_only_into_clean_plate():
    plan = Plan({"agent1": cook_prefix() + acts(
        ("wait", 6),          # t11 -> 17, cook_done at 16
        ("i", "stove1"),      # t17: pick cooked pan
        ("move", 1, 3),       # to counter1 (0,3) neighborhood
        ("i", "counter1"),    # pour pan -> plate on counter
    )})
    sim = KitchenSim(cook_kitchen(), ["burger_basic"])
    sim.run_plan(plan)
    plate = sim.grid.by_name["counter1"].contents[0]
    assert plate.kind == "plate"
    assert [c.prep() for c in plate.contents] == [("meat", True, "pan")]
    # Agent still holds the emptied pan.
    assert sim.agents["agent1"].holding.kind == "pan"
    assert sim.agents["agent1"].holding.contents == []


def test_uncooked_pan_cannot_pour():
    plan = Plan({"agent1": cook_prefix() + acts(
        ("i", "stove1"),      # t11: immediately pick the pan back up (progress 1)
        ("move", 1, 3),
        ("i", "counter1"),    # try pouring partially cooked meat
    )})
    record = execute(cook_kitchen(), ["burger_basic"], plan)
    assert record.failure_reason == "rejected-action"
    assert [e.reason for e in record.events if e.outcome == "rejected"] == ["cannot-stack"]


# ---------------------------------------------------------------------------
# Serving discipline.
# ---------------------------------------------------------------------------

def test_wrong_dish_rejected():
    # Serve raw lettuce on a plate against a salad_basic order: mismatch.
    plan = Plan({"agent1": acts(
        ("i", "lettuce_dispenser1"),
        ("move", 5, 1),
        ("i", "counter1"),     # raw lettuce onto plate
        ("i", "counter1"),     # pick plate
        ("move", 5, 3),
        ("i", "serving_window1"),
    )})
    record = execute(salad_kitchen(), ["salad_basic"], plan)
    assert not record.success
    rej = [e for e in record.events if e.outcome == "rejected"]
    assert rej[0].reason == "wrong-dish"


def test_orders_must_serve_in_sequence():
    # Two salads ordered; serving is fine twice, but the second plate must
    # wait for the first: here we serve them in order and succeed.
    grid = salad_kitchen(plates=2)
    plan = Plan({"agent1": acts(
        ("i", "lettuce_dispenser1"), ("move", 3, 1), ("i", "cutting_board1"),
        ("p", "cutting_board1"), ("i", "cutting_board1"), ("move", 5, 1),
        ("i", "counter1"), ("i", "counter1"), ("move", 5, 3), ("i", "serving_window1"),
        ("move", 1, 1),
        ("i", "lettuce_dispenser1"), ("move", 3, 1), ("i", "cutting_board1"),
        ("p", "cutting_board1"), ("i", "cutting_board1"), ("move", 5, 1),
        ("i", "counter1"), ("i", "counter1"), ("move", 5, 3), ("i", "serving_window1"),
    )})
    record = execute(grid, ["salad_basic", "salad_basic"], plan)
    assert record.success
    assert [d for d, _ in record.served] == ["salad_basic", "salad_basic"]
    assert record.served[0][1] < record.served[1][1]
    assert record.oct == record.served[1][1]


def test_dirty_plate_returns_after_delay():
    grid = salad_kitchen()
    sim = KitchenSim(grid, ["salad_basic", "salad_basic"])
    plan = Plan({"agent1": SALAD_ACTIONS + acts(("wait", 30), ("finish",))})
    record = sim.run_plan(plan)
    # Serve applied at t=14; the dirty plate lands at 14 + 10 = 24.
    assert not record.success  # second salad never made
    chute = sim.grid.by_name["dirty_plate_return1"]
    assert len(chute.contents) == 1
    assert chute.contents[0].kind == "plate" and chute.contents[0].dirty


def test_wash_cycle_produces_clean_plate():
    grid = salad_kitchen()
    sim = KitchenSim(grid, ["salad_basic", "salad_basic"])
    plan = Plan({"agent1": SALAD_ACTIONS + acts(
        ("move", 3, 5),        # t15 -> head for the chute, 4 tiles -> t19
        ("wait", 5),           # plate lands at t24
        ("i", "dirty_plate_return1"),   # pick dirty plate
        ("move", 1, 3),        # to sink1 (0,3)
        ("i", "sink1"),        # place dirty plate
        ("p", "sink1"),        # wash 3
        ("i", "sink1"),        # pick clean plate
        ("finish",),
    )})
    sim.run_plan(plan)
    held = sim.agents["agent1"].holding
    assert held.kind == "plate" and not held.dirty


# ---------------------------------------------------------------------------
# Rejections, exclusivity, timeout, exhaustion.
# ---------------------------------------------------------------------------

def test_process_locks_station_against_interact():
    grid = salad_kitchen(n_agents=2)  # spawns (1,1) and (5,1)
    plan = Plan({
        "agent1": acts(("i", "lettuce_dispenser1"), ("move", 3, 1),
                       ("i", "cutting_board1"), ("p", "cutting_board1")),
        "agent2": acts(("move", 4, 0), ("wait", 3), ("i", "cutting_board1")),
    })
    # agent2 reaches (4,0) at t=2 and waits; its interact starts at t=5,
    # inside agent1's chop running t4..t7, so the board is locked.
    record = execute(grid, ["salad_basic"], plan)
    assert record.failure_reason == "rejected-action"
    rej = [e for e in record.events if e.outcome == "rejected"][0]
    assert rej.agent == "agent2"
    assert rej.reason == "station-busy"


def test_rejected_interact_leaves_state_and_clock(tmp_path):
    grid = salad_kitchen()
    sim = KitchenSim(grid, ["salad_basic"], interactive=True)
    # Process on empty board from adjacent cell: rejected, clock frozen.
    sim.submit("agent1", Action("MoveTo", (3, 1)))
    assert sim.clock == 2
    before = sim.snapshot()
    ev = sim.submit("agent1", Action("Process", "cutting_board1"))
    assert ev.outcome == "rejected" and ev.reason == "nothing-to-chop"
    after = sim.snapshot()
    assert sim.clock == 2
    assert before == after


def test_timeout_fails_at_exactly_t_max():
    grid = salad_kitchen()
    plan = Plan({"agent1": SALAD_ACTIONS})
    record = execute(grid, ["salad_basic"], plan, t_max=14)
    assert not record.success
    assert record.failure_reason == "timeout"
    assert record.oct == 14
    # At t_max == the true finish time the run succeeds.
    record2 = execute(grid, ["salad_basic"], plan, t_max=15)
    assert record2.success and record2.oct == 15


def test_exhausted_plan_fails():
    record = execute(salad_kitchen(), ["salad_basic"], Plan({"agent1": acts(("finish",))}))
    assert not record.success
    assert record.failure_reason == "exhausted"


def test_unknown_agent_is_malformed_plan():
    record = execute(salad_kitchen(), ["salad_basic"], Plan({"agent9": acts(("finish",))}))
    assert not record.success
    assert record.failure_reason == "malformed-plan"


def test_move_rejections():
    for target, reason in [((9, 9), "out-of-bounds"), ((3, 0), "not-floor")]:
        record = execute(salad_kitchen(), ["salad_basic"],
                         Plan({"agent1": [Action("MoveTo", target)]}))
        assert record.failure_reason == "rejected-action"
        assert record.events[0].reason == reason


def test_action_after_finish_rejected():
    record = execute(salad_kitchen(), ["salad_basic"],
                     Plan({"agent1": acts(("finish",), ("wait", 1))}))
    assert record.failure_reason == "rejected-action"
    assert [e.reason for e in record.events if e.outcome == "rejected"] == ["agent-finished"]


def test_zero_duration_actions_complete_in_place():
    grid = salad_kitchen()
    sim = KitchenSim(grid, ["salad_basic"], interactive=True)
    ev = sim.submit("agent1", Action("MoveTo", (1, 1)))  # already there
    assert sim.clock == 0
    assert sim.agents["agent1"].distance == 0
    ev = sim.submit("agent1", Action("Wait", duration=0))
    assert sim.clock == 0
    assert sim.needs_decision() == ["agent1"]


# ---------------------------------------------------------------------------
# Interactive mode and palettes.
# ---------------------------------------------------------------------------

def test_interactive_flow_and_legal_actions():
    grid = salad_kitchen()
    sim = KitchenSim(grid, ["salad_basic"], interactive=True)
    legal = sim.legal_actions("agent1")
    assert legal["interact"] == ["lettuce_dispenser1"]  # adjacent at spawn
    assert legal["process"] == []
    assert legal["wait"] and legal["finish"]

    for action in SALAD_ACTIONS:
        ev = sim.submit("agent1", action)
        assert ev.outcome == "started"
    assert sim.success
    record = sim.finalize()
    assert record.success and record.oct == 15
    with pytest.raises(Exception):
        sim.submit("agent1", Action("Wait", duration=1))


def test_interactive_rejection_is_non_fatal():
    sim = KitchenSim(salad_kitchen(), ["salad_basic"], interactive=True)
    ev = sim.submit("agent1", Action("Interact", "counter1"))  # not adjacent
    assert ev.outcome == "rejected" and ev.reason == "not-adjacent"
    assert not sim.over
    ev = sim.submit("agent1", Action("Interact", "lettuce_dispenser1"))
    assert ev.outcome == "started"
    assert sim.agents["agent1"].holding.name == "lettuce"


# ---------------------------------------------------------------------------
# Plan / action JSON schema.
# ---------------------------------------------------------------------------

def test_action_json_roundtrip():
    cases = [
        {"action": "MoveTo", "target": [3, 4]},
        {"action": "Interact", "target": "stove1"},
        {"action": "Process", "target": "sink2"},
        {"action": "Wait", "duration": 7},
        {"action": "Finish"},
    ]
    for obj in cases:
        assert action_from_json(obj).to_json() == obj
    # Int-valued floats are tolerated (LLM output quirk).
    assert action_from_json({"action": "Wait", "duration": 3.0}).duration == 3
    assert action_from_json({"action": "MoveTo", "target": [2.0, 5]}).target == (2, 5)


@pytest.mark.parametrize("bad", [
    {"action": "Jump"},
    {"action": "MoveTo", "target": [1]},
    {"action": "MoveTo", "target": "stove1"},
    {"action": "MoveTo", "target": [1.5, 2]},
    {"action": "Interact", "target": 3},
    {"action": "Interact"},
    {"action": "Wait"},
    {"action": "Wait", "duration": -2},
    {"action": "Wait", "duration": "soon"},
    "MoveTo",
    None,
])
def test_bad_actions_raise(bad):
    with pytest.raises(PlanError):
        action_from_json(bad)


def test_plan_from_json_variants():
    wrapped = {"plan": {"agent1": [{"action": "Finish"}]}}
    bare = {"agent1": [{"action": "Finish"}]}
    with_cot = {"CoT": ["think"], "plan": {"agent1": [{"action": "Finish"}]}}
    for obj in (wrapped, bare, with_cot):
        plan = Plan.from_json(obj)
        assert list(plan.per_agent) == ["agent1"]
    with pytest.raises(PlanError):
        Plan.from_json({"plan": []})
    with pytest.raises(PlanError):
        Plan.from_json({"plan": {"agent1": "Finish"}})
    with pytest.raises(PlanError):
        Plan.from_json({"CoT": ["only thoughts"]})
