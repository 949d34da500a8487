"""Episode-level environment: scenario loading, reset/step, reward wiring.

The step contract: action arrays are aligned with the ascending living ids
of each group as returned in the previous observation batch; rewards come
back aligned the same way, with agents that died this step reported
separately (they carry their final reward but no observation row).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import dsl, reward_eval
from .core import AgentTypeSpec, World, border_walls, create_world
from .engine import EventLog, action_space, step as engine_step
from .errors import (
    CapacityError,
    InvalidActionError,
    InvalidConfigError,
    SwarmgridError,
)
from .observe import DEFAULT_ID_BITS, ObservationBatch, observe_group


def _schema() -> dict:
    text = resources.files("swarmgrid").joinpath("scenario_schema.json").read_text()
    return json.loads(text)


@dataclass
class StepResult:
    obs: dict  # group name -> ObservationBatch
    rewards: dict  # group name -> ndarray aligned with obs[group].ids
    dead: dict  # group name -> list of (agent id, final reward)
    done: bool
    info: dict


@dataclass
class Environment:
    """One world driven by one scenario config.  Exclusive mutation per step;
    independent environments may run fully in parallel."""

    config: dict
    world: World = None
    done: bool = False
    _group_ids: dict = field(default_factory=dict)  # name -> group id
    _last_event_log: EventLog | None = None

    @property
    def group_names(self) -> list[str]:
        return [g["name"] for g in self.config["groups"]]

    @property
    def max_steps(self) -> int:
        return self.config["termination"]["max_steps"]

    def type_spec(self, group_name: str) -> AgentTypeSpec:
        for g in self.config["groups"]:
            if g["name"] == group_name:
                return _spec_from_config(
                    next(t for t in self.config["types"] if t["name"] == g["type"])
                )
        raise InvalidConfigError(f"unknown group {group_name!r}")

    def action_space(self, group_name: str):
        return action_space(self.type_spec(group_name))

    def _obs_options(self):
        o = self.config.get("observation", {})
        bins = o.get("bins", 8) if o.get("minimap", False) else None
        return o.get("id_bits", DEFAULT_ID_BITS), bins

    def observe(self) -> dict:
        id_bits, bins = self._obs_options()
        return {
            name: observe_group(self.world, gid, id_bits=id_bits, minimap_bins=bins)
            for name, gid in self._group_ids.items()
        }

    def reset(self, seed: int) -> dict:
        cfg = self.config
        world = create_world(cfg["map"]["width"], cfg["map"]["height"], seed)
        walls = cfg["map"].get("walls", "none")
        if walls == "border":
            world.set_walls(border_walls(world.width, world.height))
        elif walls != "none":
            world.set_walls([tuple(c) for c in walls])
        type_ids = {}
        for t in cfg["types"]:
            type_ids[t["name"]] = world.register_agent_type(_spec_from_config(t))
        self._group_ids = {}
        for g in cfg["groups"]:
            gid = world.create_group(type_ids[g["type"]])
            self._group_ids[g["name"]] = gid
            spawn = g["spawn"]
            if "count" in spawn:
                world.spawn(gid, spawn["count"])
            else:
                world.spawn(
                    gid, [((x, y), d) for x, y, d in spawn["positions"]]
                )
        self.world = world
        self.done = False
        self._program = dsl.parse_program(cfg["reward_program"])
        return self.observe()

    def step(self, actions: dict) -> StepResult:
        """``actions``: group name -> index array aligned with the group's
        current living ids (ascending).  Unlisted groups act as no-ops."""
        if self.world is None:
            raise SwarmgridError("environment not reset")
        if self.done:
            raise InvalidActionError("episode is done; call reset first")
        world = self.world
        live = world.live_ids()
        full = np.zeros(len(live), dtype=np.int64)
        pos_of = {int(a): i for i, a in enumerate(live)}
        for name, arr in actions.items():
            if name not in self._group_ids:
                raise InvalidActionError(f"unknown group {name!r}")
            members = world.group_members(self._group_ids[name])
            arr = np.asarray(arr, dtype=np.int64)
            if len(arr) != len(members):
                raise InvalidActionError(
                    f"group {name!r}: {len(arr)} actions for "
                    f"{len(members)} living agents"
                )
            for m, a in zip(members, arr):
                full[pos_of[int(m)]] = a

        snap = reward_eval.make_snapshot(world, self.group_names)
        log = engine_step(world, full)  # raises before mutating on bad input
        reward_eval.finish_snapshot(snap, world)
        rewards = reward_eval.evaluate(self._program, log, snap)
        self._last_event_log = log

        alive_now = set(int(i) for i in world.live_ids())
        for i in world.live_ids():
            world.a_last_reward[i] = rewards.get(int(i), 0.0)

        obs = self.observe()
        out_rewards, out_dead = {}, {}
        for name, gid in self._group_ids.items():
            ids = obs[name].ids
            out_rewards[name] = np.array(
                [rewards.get(int(i), 0.0) for i in ids], dtype=np.float64
            )
            out_dead[name] = [
                (i, rewards.get(i, 0.0))
                for i in snap.members[name]
                if i not in alive_now
            ]

        term = self.config["termination"]
        done_when = term.get("done_when", "max_steps")
        hit_max = world.step_count >= term["max_steps"]
        extinct = any(
            world.num_alive(self._group_ids[g]) == 0
            for g in term.get("extinct_groups", [])
        )
        if done_when == "max_steps":
            self.done = hit_max
        elif done_when == "group_extinct":
            self.done = extinct
        else:
            self.done = hit_max or extinct
        info = {
            "step_count": world.step_count,
            "populations": {
                name: world.num_alive(gid)
                for name, gid in self._group_ids.items()
            },
            "events": log.counts(),
        }
        return StepResult(
            obs=obs, rewards=out_rewards, dead=out_dead, done=self.done, info=info
        )


def _spec_from_config(t: dict) -> AgentTypeSpec:
    return AgentTypeSpec(
        name=t["name"],
        body_w=t.get("body_w", 1),
        body_h=t.get("body_h", 1),
        speed=t.get("speed", 1),
        view_range=t.get("view_range", 3),
        attack_range=t.get("attack_range", 1),
        damage=t.get("damage", 1.0),
        max_hp=t.get("max_hp", 10.0),
        step_recover=t.get("step_recover", 0.0),
    )


def load_scenario(config_text: str) -> Environment:
    """Parse and cross-validate a scenario config; returns an environment
    that has not been reset.  All validation errors are collected."""
    try:
        config = json.loads(config_text)
    except json.JSONDecodeError as e:
        raise InvalidConfigError(f"config is not valid JSON: {e}") from e

    errors = []
    validator = jsonschema.Draft202012Validator(_schema())
    for err in sorted(validator.iter_errors(config), key=lambda e: list(e.path)):
        path = "/".join(str(p) for p in err.path) or "<root>"
        errors.append(f"{path}: {err.message}")
    if errors:
        raise InvalidConfigError("; ".join(errors))

    type_names = [t["name"] for t in config["types"]]
    if len(set(type_names)) != len(type_names):
        errors.append("types: duplicate type names")
    group_names = [g["name"] for g in config["groups"]]
    if len(set(group_names)) != len(group_names):
        errors.append("groups: duplicate group names")
    for i, g in enumerate(config["groups"]):
        if g["type"] not in type_names:
            errors.append(f"groups/{i}: unknown type {g['type']!r}")
    width = config["map"]["width"]
    height = config["map"]["height"]
    walls = config["map"].get("walls", "none")
    if isinstance(walls, list):
        n_walls = len({tuple(c) for c in walls})
        for c in walls:
            if not (c[0] < width and c[1] < height):
                errors.append(f"map/walls: cell {c} out of bounds")
    elif walls == "border":
        n_walls = len(border_walls(width, height))
    else:
        n_walls = 0
    free = width * height - n_walls
    total_spawn = 0
    for i, g in enumerate(config["groups"]):
        spawn = g["spawn"]
        if "count" in spawn:
            total_spawn += spawn["count"]
        else:
            total_spawn += len(spawn["positions"])
    if total_spawn > free:
        errors.append(
            f"groups: spawn total {total_spawn} exceeds {free} free cells"
        )
    try:
        program = dsl.parse_program(config["reward_program"])
        dsl.validate(
            program,
            dsl.GroupSchema(groups=tuple(group_names), width=width, height=height),
        )
    except SwarmgridError as e:
        errors.append(f"reward_program: {e}")
    term = config["termination"]
    if term.get("done_when", "max_steps") in ("group_extinct", "either"):
        for g in term.get("extinct_groups", []):
            if g not in group_names:
                errors.append(f"termination/extinct_groups: unknown group {g!r}")
    if errors:
        if any("exceeds" in e for e in errors) and len(errors) == 1:
            raise CapacityError(errors[0])
        raise InvalidConfigError("; ".join(errors))
    return Environment(config=config)
