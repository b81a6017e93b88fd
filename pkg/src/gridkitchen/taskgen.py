"""Difficulty-controlled task generation: orders, maps, calibrated bundles.

A bundle is one self-contained episode setup: map, order list, recipe texts,
time constants, and the calibrated budgets t_max / d_max (three times the OCT
and mean distance of a scripted single-agent reference solve). Bundles with
the same (category, dishes, agents, seed) are byte-identical across runs:
all randomness flows from one sha256-derived sub-seed.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field

from .engine import SimError
from .recipes import CATEGORIES, RECIPE_INDEX, Recipe
from .solver import reference_run
from .world import GridMap, Item, Station, TimeConstants

CATEGORY_DIFFICULTY = {
    "salad": "easy",
    "sashimi": "easy",
    "burger": "medium",
    "sushi": "medium",
    "burrito": "hard",
    "pasta": "hard",
}

T_MAX_FACTOR = 3
D_MAX_FACTOR = 3
MAX_MAP_ATTEMPTS = 25


class GenerationError(SimError):
    pass


def stable_seed(*parts) -> int:
    """Deterministic sub-seed from string parts (never Python's salted hash)."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def sample_order(category: str, n_dishes: int, rng: random.Random) -> list[str]:
    if category not in CATEGORIES:
        raise GenerationError(f"unknown category {category!r}")
    if not 1 <= n_dishes <= 4:
        raise GenerationError(f"n_dishes must be in 1..4, got {n_dishes}")
    return [rng.choice(CATEGORIES[category]) for _ in range(n_dishes)]


@dataclass(frozen=True)
class StationNeeds:
    """What the menu requires; the map stocks two stations of each kind."""

    ingredients: tuple[str, ...]
    needs_board: bool
    vessels: tuple[str, ...]  # sorted subset of ("pan", "pot")

    @classmethod
    def for_orders(cls, orders: list[str]) -> StationNeeds:
        ingredients: set[str] = set()
        needs_board = False
        vessels: set[str] = set()
        for dish in orders:
            recipe = RECIPE_INDEX[dish]
            ingredients.update(recipe.ingredient_names)
            needs_board = needs_board or recipe.needs_cutting
            vessels.update(recipe.vessels)
        return cls(tuple(sorted(ingredients)), needs_board, tuple(sorted(vessels)))

    def station_count(self) -> int:
        kinds = len(self.ingredients) + int(self.needs_board) + int(bool(self.vessels)) + 4
        return 2 * kinds


def generate_map(needs: StationNeeds, n_agents: int, rng: random.Random,
                 plates: int) -> GridMap:
    """Random square kitchen: stations on non-corner border cells, all-floor
    interior, agents spawned on distinct interior cells."""
    n_stations = needs.station_count()
    side = 7
    while 4 * (side - 2) < n_stations:
        side += 1
    border = [
        (x, y)
        for x in range(side) for y in range(side)
        if (x in (0, side - 1) or y in (0, side - 1))
        and not (x in (0, side - 1) and y in (0, side - 1))
    ]
    cells = rng.sample(border, n_stations)
    stations: list[Station] = []

    def add(name: str, kind: str, ingredient: str | None = None,
            contents: list[Item] | None = None) -> None:
        stations.append(Station(
            name=name, kind=kind, pos=cells[len(stations)],
            ingredient=ingredient, contents=contents or [],
        ))

    for ing in needs.ingredients:
        add(f"{ing}_dispenser1", "dispenser", ingredient=ing)
        add(f"{ing}_dispenser2", "dispenser", ingredient=ing)
    if needs.needs_board:
        add("cutting_board1", "cutting_board")
        add("cutting_board2", "cutting_board")
    if needs.vessels:
        # Both vessels -> one stove each; single vessel -> both stoves match.
        first = needs.vessels[0]
        second = needs.vessels[-1]
        add("stove1", "stove", contents=[Item(kind=first)])
        add("stove2", "stove", contents=[Item(kind=second)])
    add("counter1", "counter", contents=[Item(kind="plate") for _ in range(plates)])
    add("counter2", "counter")
    add("sink1", "sink")
    add("sink2", "sink")
    add("serving_window1", "serving_window")
    add("serving_window2", "serving_window")
    add("dirty_plate_return1", "dirty_plate_return")
    add("dirty_plate_return2", "dirty_plate_return")

    interior = [(x, y) for x in range(1, side - 1) for y in range(1, side - 1)]
    spawns = rng.sample(interior, n_agents)
    return GridMap(side, side, stations, spawns)


def map_bucket(grid: GridMap) -> str:
    """Spatial difficulty label: station spread relative to map size."""
    stations = grid.stations
    total, pairs = 0, 0
    for i, a in enumerate(stations):
        for b in stations[i + 1:]:
            total += abs(a.pos[0] - b.pos[0]) + abs(a.pos[1] - b.pos[1])
            pairs += 1
    spread = total / pairs / (grid.width + grid.height)
    return "clustered" if spread < 0.45 else "dispersed"


@dataclass
class TaskBundle:
    """Everything one episode needs, JSON-serializable and self-contained."""

    bundle_id: str
    category: str
    n_dishes: int
    n_agents: int
    seed: int
    grid: GridMap
    orders: list[str]
    constants: TimeConstants
    t_max: int
    d_max: int
    difficulty: dict = field(default_factory=dict)

    @property
    def recipes(self) -> list[Recipe]:
        seen: list[Recipe] = []
        for dish in self.orders:
            recipe = RECIPE_INDEX[dish]
            if recipe not in seen:
                seen.append(recipe)
        return seen

    def to_json(self) -> dict:
        return {
            "bundle_id": self.bundle_id,
            "category": self.category,
            "n_dishes": self.n_dishes,
            "n_agents": self.n_agents,
            "seed": self.seed,
            "map": self.grid.to_json(),
            "recipes": [r.to_json() for r in self.recipes],
            "orders": list(self.orders),
            "constants": self.constants.to_json(),
            "t_max": self.t_max,
            "d_max": self.d_max,
            "difficulty": dict(self.difficulty),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> TaskBundle:
        for dish in obj["orders"]:
            if dish not in RECIPE_INDEX:
                raise GenerationError(f"bundle orders unknown dish {dish!r}")
        return cls(
            bundle_id=obj["bundle_id"],
            category=obj["category"],
            n_dishes=obj["n_dishes"],
            n_agents=obj["n_agents"],
            seed=obj["seed"],
            grid=GridMap.from_json(obj["map"]),
            orders=list(obj["orders"]),
            constants=TimeConstants.from_json(obj["constants"]),
            t_max=obj["t_max"],
            d_max=obj["d_max"],
            difficulty=dict(obj.get("difficulty", {})),
        )

    @classmethod
    def loads(cls, text: str) -> TaskBundle:
        return cls.from_json(json.loads(text))


def assemble_bundle(category: str, n_dishes: int, n_agents: int, seed: int,
                    constants: TimeConstants | None = None) -> TaskBundle:
    """Generate one calibrated episode bundle.

    The map must be solvable by the scripted reference solver both with one
    agent (whose run calibrates t_max and d_max) and with the full crew;
    pathological layouts are resampled a bounded number of times.
    """
    constants = constants or TimeConstants()
    if not 1 <= n_agents <= 3:
        raise GenerationError(f"n_agents must be in 1..3, got {n_agents}")
    rng = random.Random(stable_seed(category, n_dishes, n_agents, seed))
    orders = sample_order(category, n_dishes, rng)
    needs = StationNeeds.for_orders(orders)
    plates = min(2, n_dishes)

    last_error: Exception | None = None
    for _attempt in range(MAX_MAP_ATTEMPTS):
        grid = generate_map(needs, n_agents, rng, plates)
        if not grid.audit_connectivity():
            continue
        try:
            solo = GridMap(grid.width, grid.height,
                           [Station.from_json(s.to_json()) for s in grid.stations],
                           grid.spawns[:1])
            _, solo_record = reference_run(solo, orders, constants)
            if n_agents > 1:
                reference_run(grid, orders, constants)
        except SimError as exc:
            last_error = exc
            continue
        t_max = T_MAX_FACTOR * solo_record.oct
        d_max = D_MAX_FACTOR * solo_record.per_agent["agent1"]["distance"]
        return TaskBundle(
            bundle_id=f"{category}-{n_dishes}d-{n_agents}a-s{seed}",
            category=category,
            n_dishes=n_dishes,
            n_agents=n_agents,
            seed=seed,
            grid=grid,
            orders=orders,
            constants=constants,
            t_max=t_max,
            d_max=d_max,
            difficulty={
                "recipe": CATEGORY_DIFFICULTY[category],
                "order": n_dishes,
                "map": map_bucket(grid),
            },
        )
    raise GenerationError(
        f"could not build solvable map for {category}/{n_dishes}d/{n_agents}a/s{seed}: "
        f"{last_error}"
    )


def run_bundle_plan(bundle: TaskBundle, plan) -> "RunRecord":
    """Execute a plan under the bundle's map, orders, constants, and t_max."""
    from .engine import execute

    return execute(bundle.grid, bundle.orders, plan,
                   constants=bundle.constants, t_max=bundle.t_max)
