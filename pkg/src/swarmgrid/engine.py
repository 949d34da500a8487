"""One engine tick: attack -> turn -> move -> recovery -> death.

Attacks resolve simultaneously from pre-step positions in ascending id
order; moves resolve sequentially under a permutation drawn from the world
RNG.  Agents whose pending HP drops to zero in the attack phase execute
nothing afterwards (their queued turn/move is dropped) but are only removed
in the death phase, so their body still blocks cells this step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .core import EMPTY, WALL, AgentTypeSpec, Direction, World
from .errors import InvalidActionError

# Action kinds, in canonical enumeration order.
DO_NOTHING = 0
TURN_LEFT = 1
TURN_RIGHT = 2
MOVE = 3
ATTACK = 4

WALL_BLOCKER = WALL  # blocker sentinel in Collide events


@dataclass(frozen=True)
class Action:
    kind: int
    dx: int = 0
    dy: int = 0


def rotate_offset(offset: tuple[int, int], direction: Direction) -> tuple[int, int]:
    """Rotate an egocentric offset into the world frame.

    North is identity; East/South/West are 90/180/270 degree clockwise
    rotations in screen coordinates (x right, y down).
    """
    dx, dy = offset
    d = int(direction) % 4
    for _ in range(d):
        dx, dy = -dy, dx
    return dx, dy


def _window_offsets(radius: int) -> list[tuple[int, int]]:
    """Row-major scan of the (2r+1)^2 window excluding (0, 0)."""
    return [
        (dx, dy)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if (dx, dy) != (0, 0)
    ]


@lru_cache(maxsize=None)
def action_space(spec: AgentTypeSpec) -> tuple[Action, ...]:
    """Canonical action list: no-op, turn left, turn right, moves, attacks."""
    actions = [Action(DO_NOTHING), Action(TURN_LEFT), Action(TURN_RIGHT)]
    actions += [Action(MOVE, dx, dy) for dx, dy in _window_offsets(spec.speed)]
    actions += [Action(ATTACK, dx, dy) for dx, dy in _window_offsets(spec.attack_range)]
    return tuple(actions)


@lru_cache(maxsize=None)
def action_table(spec: AgentTypeSpec):
    """(kinds, dxs, dys) int32 arrays indexed by action index."""
    acts = action_space(spec)
    kinds = np.array([a.kind for a in acts], dtype=np.int32)
    dxs = np.array([a.dx for a in acts], dtype=np.int32)
    dys = np.array([a.dy for a in acts], dtype=np.int32)
    return kinds, dxs, dys


@dataclass
class EventLog:
    """Primitive events emitted by one step, stored as parallel id arrays."""

    attack_actors: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    attack_targets: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    collide_actors: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    collide_blockers: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    die_ids: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    kill_actors: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    kill_targets: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))

    @property
    def attacks(self) -> list[tuple[int, int]]:
        return list(zip(self.attack_actors.tolist(), self.attack_targets.tolist()))

    @property
    def collides(self) -> list[tuple[int, int]]:
        return list(zip(self.collide_actors.tolist(), self.collide_blockers.tolist()))

    @property
    def dies(self) -> list[int]:
        return self.die_ids.tolist()

    @property
    def kills(self) -> list[tuple[int, int]]:
        return list(zip(self.kill_actors.tolist(), self.kill_targets.tolist()))

    def is_empty(self) -> bool:
        return (
            len(self.attack_actors) == 0
            and len(self.collide_actors) == 0
            and len(self.die_ids) == 0
        )

    def counts(self) -> dict:
        return {
            "attack": int(len(self.attack_actors)),
            "kill": int(len(self.kill_actors)),
            "die": int(len(self.die_ids)),
            "collide": int(len(self.collide_actors)),
        }


def _decode_actions(world: World, live: np.ndarray, actions) -> np.ndarray:
    """Normalize the action input to an index array aligned with ``live``.

    Accepts a mapping id -> index (missing agents act as no-op) or an ndarray
    already aligned with the ascending live ids.  Raises before any mutation.
    """
    if isinstance(actions, np.ndarray):
        if len(actions) != len(live):
            raise InvalidActionError(
                f"action array length {len(actions)} != living population {len(live)}"
            )
        return actions.astype(np.int64)
    idx = np.zeros(len(live), dtype=np.int64)
    if not actions:
        return idx
    pos_of = {int(a): i for i, a in enumerate(live)}
    for aid, action in actions.items():
        p = pos_of.get(int(aid))
        if p is None:
            raise InvalidActionError(f"agent {aid} is not alive")
        idx[p] = int(action)
    return idx


def step(world: World, actions) -> EventLog:
    """Advance the world one tick and return the step's event log.

    ``actions`` maps living agent ids to action indexes (or is an index
    array aligned with ``world.live_ids()``).  Any invalid id or index
    rejects the whole step with the world unchanged.
    """
    live = world.live_ids()
    idx = _decode_actions(world, live, actions)

    n_groups = len(world.groups)
    group_to_type = np.array(world.groups, dtype=np.int64) if n_groups else np.empty(0, np.int64)
    type_of_live = group_to_type[world.a_group[live]] if len(live) else np.empty(0, np.int64)

    # decode indexes to (kind, dx, dy) per living agent, validating bounds
    kind = np.zeros(len(live), dtype=np.int32)
    adx = np.zeros(len(live), dtype=np.int32)
    ady = np.zeros(len(live), dtype=np.int32)
    for t, spec in enumerate(world.types):
        sel = type_of_live == t
        if not sel.any():
            continue
        kinds, dxs, dys = action_table(spec)
        ti = idx[sel]
        if len(ti) and (ti.min() < 0 or ti.max() >= len(kinds)):
            bad = ti[(ti < 0) | (ti >= len(kinds))][0]
            raise InvalidActionError(
                f"action index {bad} out of range for type {spec.name!r} "
                f"({len(kinds)} actions)"
            )
        kind[sel] = kinds[ti]
        adx[sel] = dxs[ti]
        ady[sel] = dys[ti]

    n_total = world._n
    pending_damage = np.zeros(n_total, dtype=np.float64)
    hit_count = np.zeros(n_total, dtype=np.int64)

    # phase 1: attacks, ascending id order (live is ascending)
    att_sel = kind == ATTACK
    attacker_ids = live[att_sel]
    n_attacks = 0
    ev_a_actors = ev_a_targets = np.empty(0, np.int64)
    if len(attacker_ids):
        dmg = np.array([world.types[t].damage for t in type_of_live[att_sel]])
        out_a = np.empty(len(attacker_ids), dtype=np.int64)
        out_t = np.empty(len(attacker_ids), dtype=np.int64)
        n_attacks = _kernels.attack_phase(
            attacker_ids, adx[att_sel], ady[att_sel],
            world.a_x, world.a_y, world.a_dir, dmg,
            world.occupancy, pending_damage, hit_count, out_a, out_t,
        )
        ev_a_actors = out_a[:n_attacks].copy()
        ev_a_targets = out_t[:n_attacks].copy()

    doomed = np.zeros(n_total, dtype=bool)
    doomed[live] = world.a_hp[live] - pending_damage[live] <= 0
    acting = ~doomed[live]

    # phase 2: turns (doomed agents execute nothing after phase 1)
    tl = live[(kind == TURN_LEFT) & acting]
    tr = live[(kind == TURN_RIGHT) & acting]
    world.a_dir[tl] = (world.a_dir[tl] - 1) % 4
    world.a_dir[tr] = (world.a_dir[tr] + 1) % 4

    # phase 3: moves in a seeded random order
    mv_sel = (kind == MOVE) & acting
    mover_ids = live[mv_sel]
    ev_c_actors = ev_c_blockers = np.empty(0, np.int64)
    if len(mover_ids):
        perm = world.rng.permutation(len(mover_ids))
        order = mover_ids[perm]
        mdx = adx[mv_sel][perm]
        mdy = ady[mv_sel][perm]
        mtypes = type_of_live[mv_sel][perm]
        bw = np.array([world.types[t].body_w for t in mtypes], dtype=np.int32)
        bh = np.array([world.types[t].body_h for t in mtypes], dtype=np.int32)
        out_a = np.empty(len(order), dtype=np.int64)
        out_b = np.empty(len(order), dtype=np.int64)
        n_coll = _kernels.move_phase(
            order, mdx, mdy, bw, bh,
            world.a_x, world.a_y, world.a_dir,
            world.occupancy, out_a, out_b,
        )
        ev_c_actors = out_a[:n_coll].copy()
        ev_c_blockers = out_b[:n_coll].copy()

    # phase 4: damage then recovery (hit agents do not recover this step)
    hit = hit_count[live] > 0
    hit_ids = live[hit]
    world.a_hp[hit_ids] -= pending_damage[hit_ids]
    heal_ids = live[~hit]
    if len(heal_ids):
        types_h = type_of_live[~hit]
        recover = np.array([world.types[t].step_recover for t in types_h])
        max_hp = np.array([world.types[t].max_hp for t in types_h])
        world.a_hp[heal_ids] = np.minimum(max_hp, world.a_hp[heal_ids] + recover)

    # phase 5: deaths, kill credit to the lowest-id successful hitter
    dead_ids = live[world.a_hp[live] <= 0]
    ev_k_actors = ev_k_targets = np.empty(0, np.int64)
    if len(dead_ids):
        killer = np.full(n_total, np.iinfo(np.int64).max, dtype=np.int64)
        if n_attacks:
            np.minimum.at(killer, ev_a_targets, ev_a_actors)
        ka, kt = [], []
        for did in dead_ids:
            spec = world.types[group_to_type[world.a_group[did]]]
            x, y = int(world.a_x[did]), int(world.a_y[did])
            world.occupancy[y : y + spec.body_h, x : x + spec.body_w] = EMPTY
            world.a_alive[did] = False
            if killer[did] != np.iinfo(np.int64).max:
                ka.append(int(killer[did]))
                kt.append(int(did))
        ev_k_actors = np.array(ka, dtype=np.int64)
        ev_k_targets = np.array(kt, dtype=np.int64)

    survivors = live[world.a_alive[live]]
    world.a_last_action[survivors] = idx[world.a_alive[live]]
    world.step_count += 1

    return EventLog(
        attack_actors=ev_a_actors,
        attack_targets=ev_a_targets,
        collide_actors=ev_c_actors,
        collide_blockers=ev_c_blockers,
        die_ids=dead_ids.astype(np.int64),
        kill_actors=ev_k_actors,
        kill_targets=ev_k_targets,
    )
