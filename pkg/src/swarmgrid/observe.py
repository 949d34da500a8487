"""Egocentric observations: rotated multi-channel view plus feature vector.

Channel layout (binding contract for baselines and checkpoints):
  0            walls and out-of-bounds
  1 + 2g       presence of group g (creation order)
  2 + 2g       hp / max_hp of the occupant from group g

Feature layout: [id embedding (id_bits), last action one-hot (n_actions),
last reward (1), x / width, y / height].  When a minimap is enabled the
flattened [G, bins, bins] histogram is appended.

``observe_agent`` is the plain-python reference; ``observe_group`` batches
through a jitted kernel and must match it row for row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import WALL, World
from .engine import action_space, rotate_offset
from .errors import UnknownIdError

DEFAULT_ID_BITS = 10


def id_embedding(agent_id: int, id_bits: int) -> np.ndarray:
    """Little-endian binary coding of agent_id mod 2**id_bits."""
    v = agent_id % (1 << id_bits)
    return np.array([(v >> b) & 1 for b in range(id_bits)], dtype=np.float32)


@dataclass
class Observation:
    view: np.ndarray  # [C, H, W] float32
    features: np.ndarray  # [F] float32


@dataclass
class ObservationBatch:
    views: np.ndarray  # [N, C, H, W]
    features: np.ndarray  # [N, F]
    ids: np.ndarray  # [N] ascending


def n_channels(world: World) -> int:
    return 1 + 2 * len(world.groups)


def _features(
    world: World, agent_id: int, id_bits: int, minimap: np.ndarray | None
) -> np.ndarray:
    spec = world.group_spec(int(world.a_group[agent_id]))
    n_actions = len(action_space(spec))
    one_hot = np.zeros(n_actions, dtype=np.float32)
    one_hot[int(world.a_last_action[agent_id])] = 1.0
    parts = [
        id_embedding(agent_id, id_bits),
        one_hot,
        np.array([world.a_last_reward[agent_id]], dtype=np.float32),
        np.array(
            [world.a_x[agent_id] / world.width, world.a_y[agent_id] / world.height],
            dtype=np.float32,
        ),
    ]
    if minimap is not None:
        parts.append(minimap.ravel().astype(np.float32))
    return np.concatenate(parts)


def observe_agent(
    world: World,
    agent_id: int,
    id_bits: int = DEFAULT_ID_BITS,
    minimap_bins: int | None = None,
) -> Observation:
    """Reference single-agent observation (python loops, used as the oracle
    for the batched kernel)."""
    if not (0 <= agent_id < world._n and world.a_alive[agent_id]):
        raise UnknownIdError(f"no living agent with id {agent_id}")
    group = int(world.a_group[agent_id])
    spec = world.group_spec(group)
    r = spec.view_range
    size = 2 * r + 1
    c = n_channels(world)
    view = np.zeros((c, size, size), dtype=np.float32)
    ax, ay = int(world.a_x[agent_id]), int(world.a_y[agent_id])
    d = int(world.a_dir[agent_id])
    for vy in range(size):
        for vx in range(size):
            wdx, wdy = rotate_offset((vx - r, vy - r), d)
            cx, cy = ax + wdx, ay + wdy
            if not (0 <= cx < world.width and 0 <= cy < world.height):
                view[0, vy, vx] = 1.0
                continue
            occ = int(world.occupancy[cy, cx])
            if occ == WALL:
                view[0, vy, vx] = 1.0
            elif occ >= 0:
                g = int(world.a_group[occ])
                tspec = world.group_spec(g)
                view[1 + 2 * g, vy, vx] = 1.0
                view[2 + 2 * g, vy, vx] = world.a_hp[occ] / tspec.max_hp
    mm = global_minimap(world, minimap_bins) if minimap_bins else None
    return Observation(view=view, features=_features(world, agent_id, id_bits, mm))


def observe_group(
    world: World,
    group: int,
    id_bits: int = DEFAULT_ID_BITS,
    minimap_bins: int | None = None,
) -> ObservationBatch:
    """Batched observations for all living members of a group, ascending id."""
    spec = world.group_spec(group)
    ids = world.group_members(group)
    r = spec.view_range
    size = 2 * r + 1
    c = n_channels(world)
    n_actions = len(action_space(spec))
    mm = global_minimap(world, minimap_bins) if minimap_bins else None
    f_dim = id_bits + n_actions + 3 + (mm.size if mm is not None else 0)
    views = np.zeros((len(ids), c, size, size), dtype=np.float32)
    feats = np.zeros((len(ids), f_dim), dtype=np.float32)
    if len(ids) == 0:
        return ObservationBatch(views=views, features=feats, ids=ids)

    n = world._n
    hp_frac = np.zeros(n, dtype=np.float64)
    max_hp = np.array(
        [world.types[t].max_hp for t in world.groups], dtype=np.float64
    )
    alive = world.a_alive[:n]
    hp_frac[alive] = world.a_hp[:n][alive] / max_hp[world.a_group[:n][alive]]
    _kernels.extract_views(
        ids, world.a_x, world.a_y, world.a_dir, world.a_group,
        hp_frac, world.occupancy, r, views,
    )

    bits = np.arange(id_bits, dtype=np.int64)
    feats[:, :id_bits] = ((ids[:, None] % (1 << id_bits)) >> bits[None, :]) & 1
    feats[np.arange(len(ids)), id_bits + world.a_last_action[ids]] = 1.0
    feats[:, id_bits + n_actions] = world.a_last_reward[ids]
    feats[:, id_bits + n_actions + 1] = world.a_x[ids] / world.width
    feats[:, id_bits + n_actions + 2] = world.a_y[ids] / world.height
    if mm is not None:
        feats[:, id_bits + n_actions + 3 :] = mm.ravel()[None, :]
    return ObservationBatch(views=views, features=feats, ids=ids)


def global_minimap(world: World, bins: int) -> np.ndarray:
    """Per-group agent-count histogram over a bins x bins partition,
    normalized by group population; zero channel for extinct groups."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    g = len(world.groups)
    out = np.zeros((g, bins, bins), dtype=np.float32)
    for grp in range(g):
        ids = world.group_members(grp)
        if len(ids) == 0:
            continue
        bx = np.minimum(bins - 1, world.a_x[ids] * bins // world.width)
        by = np.minimum(bins - 1, world.a_y[ids] * bins // world.height)
        np.add.at(out[grp], (by, bx), 1.0)
        out[grp] /= len(ids)
    return out
