"""Shared fixtures: small hand-built kitchens with known geometry."""

from __future__ import annotations

from gridkitchen.world import GridMap, Item, Station


def salad_kitchen(n_agents: int = 1, plates: int = 1) -> GridMap:
    """7x7 kitchen sized for uncooked dishes; all distances hand-checkable.

    Layout (x grows right, y grows down), stations on border cells:
      lettuce_dispenser1 (1,0)   cutting_board1 (3,0)   counter1 (5,0)
      sink1 (0,3)                serving_window1 (6,3)
      dirty_plate_return1 (3,6)
    """
    stations = [
        Station("lettuce_dispenser1", "dispenser", (1, 0), ingredient="lettuce"),
        Station("cutting_board1", "cutting_board", (3, 0)),
        Station("counter1", "counter", (5, 0),
                contents=[Item(kind="plate") for _ in range(plates)]),
        Station("sink1", "sink", (0, 3)),
        Station("serving_window1", "serving_window", (6, 3)),
        Station("dirty_plate_return1", "dirty_plate_return", (3, 6)),
    ]
    spawns = [(1, 1), (5, 1), (1, 5)][:n_agents]
    return GridMap(7, 7, stations, spawns)


def cook_kitchen(vessel: str = "pan", ingredient: str = "meat") -> GridMap:
    """7x7 kitchen with one stove stocked with cookware, for cooking flows."""
    stations = [
        Station(f"{ingredient}_dispenser1", "dispenser", (1, 0), ingredient=ingredient),
        Station("cutting_board1", "cutting_board", (3, 0)),
        Station("stove1", "stove", (5, 0), contents=[Item(kind=vessel)]),
        Station("counter1", "counter", (0, 3), contents=[Item(kind="plate")]),
        Station("serving_window1", "serving_window", (6, 3)),
        Station("dirty_plate_return1", "dirty_plate_return", (3, 6)),
        Station("sink1", "sink", (0, 5)),
    ]
    return GridMap(7, 7, stations, [(1, 1)])
