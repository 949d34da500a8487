"""Replay files: line-delimited JSON, one header object then one frame per
step.  The same objects travel over the websocket wire, so a recorded file
renders identically to the live run that produced it."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import WALL
from .errors import ReplayFormatError

REPLAY_VERSION = 1


@dataclass
class ReplayHeader:
    version: int
    width: int
    height: int
    walls: list  # [[x, y], ...]
    types: list  # type spec dicts
    groups: list  # [{"name":..., "type":...}, ...]
    scenario: str
    seed: int

    def to_json(self) -> str:
        d = {"t": "header", **asdict(self)}
        return json.dumps(d, sort_keys=True, separators=(",", ":"))


@dataclass
class Frame:
    step: int
    agents: list  # [[id, group, x, y, dir, hp], ...] ascending id
    events: dict  # {"attack": [[a,t]], "kill": [[a,t]], "die": [i], "collide": [[a,b]]}
    rewards: dict = field(default_factory=dict)  # id (str) -> reward
    populations: dict = field(default_factory=dict)  # group name -> count

    def to_json(self) -> str:
        d = {"t": "frame", **asdict(self)}
        return json.dumps(d, sort_keys=True, separators=(",", ":"))


def header_from_env(env, seed: int) -> ReplayHeader:
    cfg = env.config
    walls = np.argwhere(env.world.occupancy == WALL)
    return ReplayHeader(
        version=REPLAY_VERSION,
        width=env.world.width,
        height=env.world.height,
        walls=[[int(x), int(y)] for y, x in walls],
        types=cfg["types"],
        groups=[{"name": g["name"], "type": g["type"]} for g in cfg["groups"]],
        scenario=cfg.get("scenario", ""),
        seed=seed,
    )


def frame_from_env(env, event_log, rewards: dict) -> Frame:
    world = env.world
    agents = [
        [int(i), int(world.a_group[i]), int(world.a_x[i]), int(world.a_y[i]),
         int(world.a_dir[i]), float(world.a_hp[i])]
        for i in world.live_ids()
    ]
    events = {
        "attack": [[int(a), int(t)] for a, t in event_log.attacks],
        "kill": [[int(a), int(t)] for a, t in event_log.kills],
        "die": [int(i) for i in event_log.dies],
        "collide": [[int(a), int(b)] for a, b in event_log.collides],
    }
    return Frame(
        step=world.step_count,
        agents=agents,
        events=events,
        rewards={str(k): float(v) for k, v in sorted(rewards.items())},
        populations={
            name: world.num_alive(gid) for name, gid in env._group_ids.items()
        },
    )


class ReplayWriter:
    """Writes header then frames to a text sink; flush on close."""

    def __init__(self, sink, header: ReplayHeader):
        self._sink = sink
        self._sink.write(header.to_json() + "\n")
        self.frames_written = 0

    def write_frame(self, frame: Frame) -> None:
        self._sink.write(frame.to_json() + "\n")
        self.frames_written += 1

    def close(self) -> None:
        self._sink.flush()


class ReplayReader:
    """Streaming reader; ``truncated`` is set after iteration if the file
    ended mid-frame."""

    def __init__(self, source):
        self._source = source
        self.truncated = False
        first = source.readline()
        if not first.strip():
            raise ReplayFormatError("empty replay file")
        try:
            d = json.loads(first)
        except json.JSONDecodeError as e:
            raise ReplayFormatError(f"malformed header: {e}") from e
        if d.get("t") != "header":
            raise ReplayFormatError("first record is not a header")
        version = d.get("version")
        if version != REPLAY_VERSION:
            raise ReplayFormatError(
                f"unsupported replay version {version!r} "
                f"(expected {REPLAY_VERSION})"
            )
        d.pop("t")
        self.header = ReplayHeader(**d)

    def __iter__(self):
        for line in self._source:
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError:
                self.truncated = True
                return
            if d.get("t") != "frame":
                self.truncated = True
                return
            d.pop("t")
            yield Frame(**d)


def read_replay(source) -> ReplayReader:
    return ReplayReader(source)


def run_episode(
    env,
    seed: int,
    policies: dict,
    max_steps: int | None = None,
    record_sink=None,
    on_frame=None,
):
    """Run one episode with per-group policies and optional recording.

    ``policies``: group name -> "random" | "chase_nearest" | callable
    taking (env, ObservationBatch) and returning an action index array.
    Returns (per-group total rewards, steps run, final populations).
    """
    from .dqn import scripted_policy

    obs = env.reset(seed)
    writer = None
    if record_sink is not None:
        writer = ReplayWriter(record_sink, header_from_env(env, seed))
    totals = {g: 0.0 for g in env.group_names}
    steps = 0
    limit = max_steps if max_steps is not None else env.max_steps
    while steps < limit:
        actions = {}
        for g in env.group_names:
            pol = policies.get(g, "random")
            if callable(pol):
                actions[g] = pol(env, obs[g])
            else:
                actions[g] = scripted_policy(pol, env.world, env._group_ids[g])
        res = env.step(actions)
        steps += 1
        obs = res.obs
        step_rewards = {}
        for g in env.group_names:
            for i, r in zip(res.obs[g].ids, res.rewards[g]):
                if r:
                    step_rewards[int(i)] = float(r)
            for i, r in res.dead[g]:
                if r:
                    step_rewards[int(i)] = float(r)
            totals[g] += float(res.rewards[g].sum())
            totals[g] += sum(r for _, r in res.dead[g])
        frame = frame_from_env(env, env._last_event_log, step_rewards)
        if writer is not None:
            writer.write_frame(frame)
        if on_frame is not None:
            on_frame(frame)
        if res.done:
            break
    if writer is not None:
        writer.close()
    return totals, steps, res.info["populations"]
