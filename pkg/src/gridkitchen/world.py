"""Kitchen world model: grid geometry, stations, items, agents, order queue.

Coordinates are (x, y) with x the column and y the row, origin at the top
left. Serialized positions are two-element lists [x, y]. All state here is
plain data; the rules that mutate it live in the engine.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

Coord = tuple[int, int]

# Cardinal neighbor offsets in fixed N, E, S, W order. This order is the tie
# breaker anywhere a direction choice could be ambiguous (BFS expansion).
CARDINALS: tuple[Coord, ...] = ((0, -1), (1, 0), (0, 1), (-1, 0))

STATION_KINDS = (
    "dispenser",
    "cutting_board",
    "stove",
    "sink",
    "counter",
    "serving_window",
    "dirty_plate_return",
)

ITEM_KINDS = ("ingredient", "plate", "pot", "pan")
COOKWARE_KINDS = ("pot", "pan")


class WorldError(Exception):
    """Base for world-model validation problems."""


class MapValidationError(WorldError):
    pass


class BoundsError(WorldError):
    pass


@dataclass(frozen=True)
class TimeConstants:
    """Durations (integer time units) for every timed activity.

    All values must be positive; move_per_tile multiplies path length.
    """

    interact: int = 1
    cut: int = 3
    pot_cook: int = 8
    pan_cook: int = 6
    wash_plate: int = 3
    dirty_plate_return: int = 10
    move_per_tile: int = 1

    def validate(self) -> None:
        for name, value in self.to_json().items():
            if not isinstance(value, int) or value <= 0:
                raise WorldError(f"time constant {name} must be a positive int, got {value!r}")

    def cook_time(self, vessel: str) -> int:
        if vessel == "pot":
            return self.pot_cook
        if vessel == "pan":
            return self.pan_cook
        raise WorldError(f"no cook time for vessel {vessel!r}")

    def to_json(self) -> dict:
        return {
            "interact": self.interact,
            "cut": self.cut,
            "pot_cook": self.pot_cook,
            "pan_cook": self.pan_cook,
            "wash_plate": self.wash_plate,
            "dirty_plate_return": self.dirty_plate_return,
            "move_per_tile": self.move_per_tile,
        }

    @classmethod
    def from_json(cls, obj: dict) -> TimeConstants:
        return cls(**{k: obj[k] for k in cls().to_json()})


DEFAULT_CONSTANTS = TimeConstants()


@dataclass
class Item:
    """A movable object: ingredient, plate, or cookware (pot/pan).

    Ingredients track chopping and cooking state. cook_progress accumulates
    time already spent cooking so a paused cook resumes where it stopped;
    cooked_in is set to the vessel kind only when cooking completed.
    Containers (plate/pot/pan) carry their load in contents.
    """

    kind: str
    name: str = ""
    chopped: bool = False
    cooked_in: str | None = None
    cook_progress: int = 0
    dirty: bool = False
    contents: list[Item] = field(default_factory=list)

    @property
    def is_container(self) -> bool:
        return self.kind in ("plate", "pot", "pan")

    @property
    def is_cookware(self) -> bool:
        return self.kind in COOKWARE_KINDS

    @property
    def is_ingredient(self) -> bool:
        return self.kind == "ingredient"

    @property
    def cooked(self) -> bool:
        return self.cooked_in is not None

    def prep(self) -> tuple[str, bool, str | None]:
        """Identity triple used for dish matching at the serving window."""
        return (self.name, self.chopped, self.cooked_in)

    def state_label(self) -> str:
        if self.kind == "plate":
            return "dirty_plate" if self.dirty else "clean_plate"
        if self.is_cookware:
            return self.kind
        if self.cooked_in is not None:
            return "cooked"
        if self.cook_progress > 0:
            return "partially_cooked"
        if self.chopped:
            return "chopped"
        return "raw"

    def to_json(self) -> dict:
        if self.kind == "ingredient":
            return {
                "kind": "ingredient",
                "name": self.name,
                "chopped": self.chopped,
                "cooked_in": self.cooked_in,
                "cook_progress": self.cook_progress,
            }
        if self.kind == "plate":
            return {
                "kind": "plate",
                "dirty": self.dirty,
                "contents": [c.to_json() for c in self.contents],
            }
        return {"kind": self.kind, "contents": [c.to_json() for c in self.contents]}

    @classmethod
    def from_json(cls, obj: dict) -> Item:
        kind = obj.get("kind")
        if kind not in ITEM_KINDS:
            raise WorldError(f"bad item kind {kind!r}")
        if kind == "ingredient":
            return cls(
                kind="ingredient",
                name=obj["name"],
                chopped=bool(obj.get("chopped", False)),
                cooked_in=obj.get("cooked_in"),
                cook_progress=int(obj.get("cook_progress", 0)),
            )
        contents = [cls.from_json(c) for c in obj.get("contents", [])]
        if kind == "plate":
            return cls(kind="plate", dirty=bool(obj.get("dirty", False)), contents=contents)
        return cls(kind=kind, contents=contents)

    def copy(self) -> Item:
        return Item.from_json(self.to_json())


@dataclass
class Station:
    """A fixed workstation occupying one non-walkable grid cell.

    contents is a stack: the last element is on top and is what an empty
    handed Interact picks up. busy_by holds the agent id of an in-flight
    Process, which locks the station against everyone else.
    """

    name: str
    kind: str
    pos: Coord
    ingredient: str | None = None
    contents: list[Item] = field(default_factory=list)
    busy_by: str | None = None

    @property
    def top(self) -> Item | None:
        return self.contents[-1] if self.contents else None

    def to_json(self) -> dict:
        obj: dict = {"name": self.name, "kind": self.kind, "pos": list(self.pos)}
        if self.ingredient is not None:
            obj["ingredient"] = self.ingredient
        if self.contents:
            obj["contents"] = [c.to_json() for c in self.contents]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> Station:
        kind = obj.get("kind")
        if kind not in STATION_KINDS:
            raise MapValidationError(f"unknown station kind {kind!r}")
        pos = obj.get("pos")
        if not (isinstance(pos, (list, tuple)) and len(pos) == 2):
            raise MapValidationError(f"station {obj.get('name')!r} has bad pos {pos!r}")
        return cls(
            name=obj["name"],
            kind=kind,
            pos=(int(pos[0]), int(pos[1])),
            ingredient=obj.get("ingredient"),
            contents=[Item.from_json(c) for c in obj.get("contents", [])],
        )


@dataclass
class AgentState:
    """One agent: where it stands, what it holds, how busy it is."""

    agent_id: str
    pos: Coord
    holding: Item | None = None
    busy_until: int = 0
    finished: bool = False
    distance: int = 0
    work_time: int = 0

    def to_json(self) -> dict:
        return {
            "id": self.agent_id,
            "pos": list(self.pos),
            "holding": self.holding.to_json() if self.holding else None,
            "busy_until": self.busy_until,
            "finished": self.finished,
            "distance": self.distance,
            "work_time": self.work_time,
        }


@dataclass
class OrderQueue:
    """Ordered list of dish ids; dishes must be served in exact sequence."""

    dishes: list[str]
    next_index: int = 0

    @property
    def next_dish(self) -> str | None:
        if self.next_index < len(self.dishes):
            return self.dishes[self.next_index]
        return None

    @property
    def complete(self) -> bool:
        return self.next_index >= len(self.dishes)

    def to_json(self) -> dict:
        return {"dishes": list(self.dishes), "next_index": self.next_index}


class GridMap:
    """Rectangular kitchen grid. Station cells are impassable; everything
    else is walkable floor. Agents never block each other.
    """

    def __init__(self, width: int, height: int, stations: list[Station], spawns: list[Coord]):
        self.width = width
        self.height = height
        self.stations = list(stations)
        self.spawns = [tuple(s) for s in spawns]
        self.by_name: dict[str, Station] = {s.name: s for s in self.stations}
        self._station_cells = {s.pos: s for s in self.stations}
        self.validate()

    # -- geometry ---------------------------------------------------------

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def station_at(self, c: Coord) -> Station | None:
        return self._station_cells.get(c)

    def passable(self, c: Coord) -> bool:
        if not self.in_bounds(c):
            raise BoundsError(f"cell {c} outside {self.width}x{self.height} grid")
        return c not in self._station_cells

    def neighbors(self, c: Coord):
        for dx, dy in CARDINALS:
            n = (c[0] + dx, c[1] + dy)
            if self.in_bounds(n):
                yield n

    def adjacent_stations(self, c: Coord) -> list[Station]:
        """Stations reachable by an Interact from floor cell c, in N,E,S,W order."""
        out = []
        for dx, dy in CARDINALS:
            s = self._station_cells.get((c[0] + dx, c[1] + dy))
            if s is not None:
                out.append(s)
        return out

    def adjacent_floor(self, station: Station) -> list[Coord]:
        """Floor cells from which station can be used, in N,E,S,W order."""
        out = []
        for dx, dy in CARDINALS:
            n = (station.pos[0] + dx, station.pos[1] + dy)
            if self.in_bounds(n) and n not in self._station_cells:
                out.append(n)
        return out

    def shortest_path(self, start: Coord, goal: Coord) -> list[Coord] | None:
        """BFS shortest path over floor cells, inclusive of both endpoints.

        Ties are broken by the fixed N,E,S,W expansion order: the first time a
        cell is discovered fixes its parent, so equal-length paths always
        resolve the same way. Returns None when no path exists.
        """
        if not self.passable(start) or not self.passable(goal):
            raise WorldError(f"path endpoints must be floor cells: {start} -> {goal}")
        if start == goal:
            return [start]
        parent: dict[Coord, Coord] = {start: start}
        q = deque([start])
        while q:
            cur = q.popleft()
            for dx, dy in CARDINALS:
                n = (cur[0] + dx, cur[1] + dy)
                if n in parent or not self.in_bounds(n) or n in self._station_cells:
                    continue
                parent[n] = cur
                if n == goal:
                    path = [n]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path
                q.append(n)
        return None

    def path_tiles(self, start: Coord, goal: Coord) -> int | None:
        """Number of moves (path length - 1) between two floor cells."""
        p = self.shortest_path(start, goal)
        return None if p is None else len(p) - 1

    # -- validation / io --------------------------------------------------

    def validate(self) -> None:
        if self.width < 3 or self.height < 3:
            raise MapValidationError("map must be at least 3x3")
        seen_names: set[str] = set()
        seen_cells: set[Coord] = set()
        for s in self.stations:
            if s.name in seen_names:
                raise MapValidationError(f"duplicate station name {s.name!r}")
            seen_names.add(s.name)
            if not self.in_bounds(s.pos):
                raise MapValidationError(f"station {s.name} at {s.pos} out of bounds")
            if s.pos in seen_cells:
                raise MapValidationError(f"two stations share cell {s.pos}")
            seen_cells.add(s.pos)
            if s.kind == "dispenser" and not s.ingredient:
                raise MapValidationError(f"dispenser {s.name} lacks an ingredient")
        for sp in self.spawns:
            if not self.in_bounds(sp):
                raise MapValidationError(f"spawn {sp} out of bounds")
            if sp in seen_cells:
                raise MapValidationError(f"spawn {sp} sits on a station")
        if len(set(self.spawns)) != len(self.spawns):
            raise MapValidationError("agent spawns must be distinct cells")

    def audit_connectivity(self) -> bool:
        """True when all spawns and at least one floor neighbor of every
        station sit in one connected floor component."""
        if not self.spawns:
            return True
        root = self.spawns[0]
        seen = {root}
        q = deque([root])
        while q:
            cur = q.popleft()
            for dx, dy in CARDINALS:
                n = (cur[0] + dx, cur[1] + dy)
                if n in seen or not self.in_bounds(n) or n in self._station_cells:
                    continue
                seen.add(n)
                q.append(n)
        if any(sp not in seen for sp in self.spawns):
            return False
        for s in self.stations:
            if not any(c in seen for c in self.adjacent_floor(s)):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "stations": [s.to_json() for s in self.stations],
            "agents": [list(sp) for sp in self.spawns],
        }

    @classmethod
    def from_json(cls, obj: dict) -> GridMap:
        try:
            width = int(obj["width"])
            height = int(obj["height"])
            stations = [Station.from_json(s) for s in obj["stations"]]
            spawns = [(int(a[0]), int(a[1])) for a in obj["agents"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise MapValidationError(f"malformed map json: {exc}") from exc
        return cls(width, height, stations, spawns)
