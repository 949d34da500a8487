"""World state: map, walls, agent types, groups, agents, and the occupancy index.

The world is stored struct-of-arrays so the step engine and observation
extraction can run vectorized / jitted over the whole population.  Agent ids
are assigned monotonically and never reused; dead agents keep their array row
but are flagged not-alive and removed from the occupancy index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import (
    CapacityError,
    InvalidConfigError,
    PlacementError,
    UnknownIdError,
)

# Occupancy sentinels.  Anything >= 0 is an agent id.
EMPTY = -1
WALL = -2


class Direction(IntEnum):
    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3

    def turn_left(self) -> "Direction":
        return Direction((self - 1) % 4)

    def turn_right(self) -> "Direction":
        return Direction((self + 1) % 4)


@dataclass(frozen=True)
class Position:
    x: int
    y: int


@dataclass(frozen=True)
class AgentTypeSpec:
    """Per-type attribute bundle.

    view_range and attack_range are half-widths of egocentric Chebyshev
    squares; speed is the max Chebyshev move distance per step.
    """

    name: str
    body_w: int = 1
    body_h: int = 1
    speed: int = 1
    view_range: int = 3
    attack_range: int = 1
    damage: float = 1.0
    max_hp: float = 10.0
    step_recover: float = 0.0

    def validate(self) -> None:
        if not self.name or not isinstance(self.name, str):
            raise InvalidConfigError("agent type needs a non-empty name")
        if self.body_w < 1 or self.body_h < 1:
            raise InvalidConfigError(f"type {self.name!r}: body must be >= 1x1")
        if self.speed < 0:
            raise InvalidConfigError(f"type {self.name!r}: speed must be >= 0")
        if self.view_range < 0:
            raise InvalidConfigError(f"type {self.name!r}: view_range must be >= 0")
        if self.attack_range < 0:
            raise InvalidConfigError(f"type {self.name!r}: attack_range must be >= 0")
        for field in ("damage", "max_hp", "step_recover"):
            v = getattr(self, field)
            if not math.isfinite(v):
                raise InvalidConfigError(f"type {self.name!r}: {field} must be finite")
        if self.damage < 0:
            raise InvalidConfigError(f"type {self.name!r}: damage must be >= 0")
        if self.max_hp <= 0:
            raise InvalidConfigError(f"type {self.name!r}: max_hp must be > 0")
        if self.step_recover < 0:
            raise InvalidConfigError(f"type {self.name!r}: step_recover must be >= 0")


class Agent:
    """Live read-only view of one agent's row in the world arrays."""

    __slots__ = ("_world", "id")

    def __init__(self, world: "World", agent_id: int):
        self._world = world
        self.id = agent_id

    @property
    def group(self) -> int:
        return int(self._world.a_group[self.id])

    @property
    def type_id(self) -> int:
        return self._world.groups[self.group]

    @property
    def spec(self) -> AgentTypeSpec:
        return self._world.types[self.type_id]

    @property
    def pos(self) -> Position:
        return Position(int(self._world.a_x[self.id]), int(self._world.a_y[self.id]))

    @property
    def dir(self) -> Direction:
        return Direction(int(self._world.a_dir[self.id]))

    @property
    def hp(self) -> float:
        return float(self._world.a_hp[self.id])

    @property
    def last_action(self) -> int:
        return int(self._world.a_last_action[self.id])

    @property
    def last_reward(self) -> float:
        return float(self._world.a_last_reward[self.id])

    @property
    def alive(self) -> bool:
        return bool(self._world.a_alive[self.id])

    def body_cells(self):
        """Row-major iteration over the cells covered by the body."""
        spec = self.spec
        x0, y0 = int(self._world.a_x[self.id]), int(self._world.a_y[self.id])
        for dy in range(spec.body_h):
            for dx in range(spec.body_w):
                yield (x0 + dx, y0 + dy)

    def __repr__(self):
        return (
            f"Agent(id={self.id}, group={self.group}, pos=({self.pos.x},{self.pos.y}), "
            f"dir={self.dir.name}, hp={self.hp:g})"
        )


class World:
    """The single mutable simulation state.

    Mutating operations require exclusive access; reads may run concurrently
    with each other.  All randomness flows through ``self.rng``.
    """

    _GROW = 256

    def __init__(self, width: int, height: int, seed: int):
        if width < 1 or height < 1:
            raise InvalidConfigError(
                f"world dimensions must be >= 1, got {width}x{height}"
            )
        self.width = width
        self.height = height
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.step_count = 0
        self.occupancy = np.full((height, width), EMPTY, dtype=np.int32)
        self.types: list[AgentTypeSpec] = []
        self.groups: list[int] = []  # group id -> type id
        self._n = 0  # total ids ever assigned
        cap = self._GROW
        self.a_group = np.zeros(cap, dtype=np.int32)
        self.a_x = np.zeros(cap, dtype=np.int32)
        self.a_y = np.zeros(cap, dtype=np.int32)
        self.a_dir = np.zeros(cap, dtype=np.int32)
        self.a_hp = np.zeros(cap, dtype=np.float64)
        self.a_last_action = np.zeros(cap, dtype=np.int32)
        self.a_last_reward = np.zeros(cap, dtype=np.float64)
        self.a_alive = np.zeros(cap, dtype=bool)

    # -- registration ------------------------------------------------------

    def register_agent_type(self, spec: AgentTypeSpec) -> int:
        spec.validate()
        if any(t.name == spec.name for t in self.types):
            raise InvalidConfigError(f"duplicate agent type name {spec.name!r}")
        self.types.append(spec)
        return len(self.types) - 1

    def create_group(self, type_id: int) -> int:
        if not 0 <= type_id < len(self.types):
            raise UnknownIdError(f"unknown type id {type_id}")
        self.groups.append(type_id)
        return len(self.groups) - 1

    def group_spec(self, group: int) -> AgentTypeSpec:
        if not 0 <= group < len(self.groups):
            raise UnknownIdError(f"unknown group id {group}")
        return self.types[self.groups[group]]

    # -- walls -------------------------------------------------------------

    def set_walls(self, cells) -> None:
        for cell in cells:
            x, y = (cell.x, cell.y) if isinstance(cell, Position) else cell
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise PlacementError(f"wall cell ({x},{y}) out of bounds")
            occ = self.occupancy[y, x]
            if occ >= 0:
                raise PlacementError(f"wall cell ({x},{y}) occupied by agent {occ}")
            self.occupancy[y, x] = WALL

    # -- spawning ----------------------------------------------------------

    def _grow_to(self, n: int) -> None:
        cap = len(self.a_x)
        if n <= cap:
            return
        new_cap = max(n, cap * 2)
        for name in (
            "a_group", "a_x", "a_y", "a_dir", "a_hp",
            "a_last_action", "a_last_reward", "a_alive",
        ):
            arr = getattr(self, name)
            grown = np.zeros(new_cap, dtype=arr.dtype)
            grown[:cap] = arr
            setattr(self, name, grown)

    def _body_fits(self, spec: AgentTypeSpec, x: int, y: int) -> bool:
        if x < 0 or y < 0 or x + spec.body_w > self.width or y + spec.body_h > self.height:
            return False
        return bool(
            (self.occupancy[y : y + spec.body_h, x : x + spec.body_w] == EMPTY).all()
        )

    def _place(self, group: int, x: int, y: int, direction: int) -> int:
        spec = self.group_spec(group)
        agent_id = self._n
        self._grow_to(agent_id + 1)
        self._n += 1
        self.a_group[agent_id] = group
        self.a_x[agent_id] = x
        self.a_y[agent_id] = y
        self.a_dir[agent_id] = direction
        self.a_hp[agent_id] = spec.max_hp
        self.a_last_action[agent_id] = 0  # no-op index
        self.a_last_reward[agent_id] = 0.0
        self.a_alive[agent_id] = True
        self.occupancy[y : y + spec.body_h, x : x + spec.body_w] = agent_id
        return agent_id

    def spawn(self, group: int, placement) -> list[int]:
        """Create agents for ``group``.

        ``placement`` is either a list of ((x, y), Direction) pairs or an
        integer count placed by rejection sampling from the world RNG.
        """
        spec = self.group_spec(group)
        ids: list[int] = []
        if isinstance(placement, int):
            n = placement
            budget = self.width * self.height * 10
            while len(ids) < n:
                if budget <= 0:
                    raise CapacityError(
                        f"could not place {n} agents of group {group}; "
                        f"placed {len(ids)} before exhausting draws"
                    )
                budget -= 1
                x = int(self.rng.integers(0, self.width))
                y = int(self.rng.integers(0, self.height))
                if self._body_fits(spec, x, y):
                    d = int(self.rng.integers(0, 4))
                    ids.append(self._place(group, x, y, d))
            return ids
        for pos, direction in placement:
            x, y = (pos.x, pos.y) if isinstance(pos, Position) else pos
            if not self._body_fits(spec, x, y):
                raise PlacementError(
                    f"cannot place body {spec.body_w}x{spec.body_h} at ({x},{y})"
                )
            ids.append(self._place(group, x, y, int(direction)))
        return ids

    # -- queries -----------------------------------------------------------

    def live_ids(self) -> np.ndarray:
        """Living agent ids in ascending (canonical) order."""
        return np.flatnonzero(self.a_alive[: self._n]).astype(np.int64)

    def agents(self):
        """Iterate living agents in canonical id order."""
        for i in self.live_ids():
            yield Agent(self, int(i))

    def get_agent(self, agent_id: int) -> Agent:
        if not (0 <= agent_id < self._n and self.a_alive[agent_id]):
            raise UnknownIdError(f"no living agent with id {agent_id}")
        return Agent(self, agent_id)

    def num_alive(self, group: int | None = None) -> int:
        alive = self.a_alive[: self._n]
        if group is None:
            return int(alive.sum())
        return int((alive & (self.a_group[: self._n] == group)).sum())

    def group_members(self, group: int) -> np.ndarray:
        """Living ids of one group, ascending."""
        mask = self.a_alive[: self._n] & (self.a_group[: self._n] == group)
        return np.flatnonzero(mask).astype(np.int64)

    def query_rect(self, x0: int, y0: int, x1: int, y1: int) -> list[int]:
        """Ids of agents with any body cell in the inclusive rectangle."""
        x0c, x1c = max(0, x0), min(self.width - 1, x1)
        y0c, y1c = max(0, y0), min(self.height - 1, y1)
        if x0c > x1c or y0c > y1c:
            return []
        region = self.occupancy[y0c : y1c + 1, x0c : x1c + 1]
        ids = np.unique(region[region >= 0])
        return [int(i) for i in ids]

    # -- invariants --------------------------------------------------------

    def rebuild_occupancy(self) -> np.ndarray:
        """Reconstruct the occupancy index from walls plus the agent registry."""
        occ = np.where(self.occupancy == WALL, WALL, EMPTY).astype(np.int32)
        for agent in self.agents():
            spec = agent.spec
            x, y = agent.pos.x, agent.pos.y
            occ[y : y + spec.body_h, x : x + spec.body_w] = agent.id
        return occ

    def check_occupancy(self) -> bool:
        return bool(np.array_equal(self.occupancy, self.rebuild_occupancy()))

    def state_snapshot(self) -> dict:
        """Deep-comparable state dict (used by determinism tests)."""
        n = self._n
        return {
            "width": self.width,
            "height": self.height,
            "step_count": self.step_count,
            "occupancy": self.occupancy.copy(),
            "group": self.a_group[:n].copy(),
            "x": self.a_x[:n].copy(),
            "y": self.a_y[:n].copy(),
            "dir": self.a_dir[:n].copy(),
            "hp": self.a_hp[:n].copy(),
            "last_action": self.a_last_action[:n].copy(),
            "last_reward": self.a_last_reward[:n].copy(),
            "alive": self.a_alive[:n].copy(),
            "rng": self.rng.bit_generator.state,
        }


def create_world(width: int, height: int, seed: int) -> World:
    return World(width, height, seed)


def border_walls(width: int, height: int) -> list[tuple[int, int]]:
    """Perimeter cells of a width x height map."""
    cells = []
    for x in range(width):
        cells.append((x, 0))
        if height > 1:
            cells.append((x, height - 1))
    for y in range(1, height - 1):
        cells.append((0, y))
        if width > 1:
            cells.append((width - 1, y))
    return cells
