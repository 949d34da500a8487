"""Websocket serving of live simulations and recorded replays.

One session = one engine loop.  All world mutations flow through a single
ordered command queue drained only between engine steps; client sockets
communicate with the loop solely via that queue and a broadcast channel.

Wire protocol (one JSON object per text frame):
  server -> client: {"t":"header",...} on connect, {"t":"frame",...} per
  step, {"t":"ack","cmd":...} after an applied control message,
  {"t":"error","msg":...} for a rejected one.
  client -> server: {"t":"control","cmd":<name>, ...args} with cmd one of
  pause, resume, speed, step, take, release, act, spawn, kill, viewport.
"""

from __future__ import annotations

import asyncio
import json

import numpy as np

from .core import Direction
from .engine import action_table
from .errors import SwarmgridError
from .replay import Frame, ReplayHeader, frame_from_env, header_from_env, read_replay

REPLAY_ALLOWED = {"pause", "resume", "speed", "step", "viewport"}


class ReplaySource:
    """Pre-loaded recorded episode."""

    def __init__(self, path):
        with open(path) as f:
            reader = read_replay(f)
            self.frames = list(reader)
            self.header = reader.header
        self._i = 0
        self.live = False

    def next_frame(self):
        if self._i >= len(self.frames):
            return None
        f = self.frames[self._i]
        self._i += 1
        return f


class LiveSource:
    """Live environment stepped under per-group policies, with per-agent
    human takeover."""

    def __init__(self, env, policies: dict, seed: int):
        from .dqn import scripted_policy

        self._scripted = scripted_policy
        self.env = env
        self.policies = policies
        self.seed = seed
        self.obs = env.reset(seed)
        self.header = header_from_env(env, seed)
        self.controlled: set[int] = set()
        self.pending_actions: dict[int, int] = {}
        self.live = True

    def next_frame(self):
        env = self.env
        if env.done:
            return None
        actions = {}
        for g in env.group_names:
            pol = self.policies.get(g, "random")
            if callable(pol):
                arr = pol(env, self.obs[g])
            else:
                arr = self._scripted(pol, env.world, env._group_ids[g])
            members = env.world.group_members(env._group_ids[g])
            for i, aid in enumerate(members):
                if int(aid) in self.controlled:
                    arr[i] = self.pending_actions.get(int(aid), 0)
            actions[g] = arr
        res = env.step(actions)
        self.pending_actions.clear()
        self.obs = res.obs
        rewards = {}
        for g in env.group_names:
            for i, r in zip(res.obs[g].ids, res.rewards[g]):
                if r:
                    rewards[int(i)] = float(r)
            for i, r in res.dead[g]:
                if r:
                    rewards[int(i)] = float(r)
        self.controlled &= {int(i) for i in env.world.live_ids()}
        return frame_from_env(env, env._last_event_log, rewards)

    # -- control ------------------------------------------------------------

    def take(self, agent_id: int):
        self.env.world.get_agent(agent_id)  # raises if not alive
        self.controlled.add(agent_id)

    def release(self, agent_id: int):
        self.controlled.discard(agent_id)
        self.pending_actions.pop(agent_id, None)

    def human_action(self, agent_id: int, action_index: int):
        if agent_id not in self.controlled:
            raise SwarmgridError(f"agent {agent_id} is not under control")
        agent = self.env.world.get_agent(agent_id)
        kinds, _, _ = action_table(agent.spec)
        if not 0 <= action_index < len(kinds):
            raise SwarmgridError(
                f"action index {action_index} out of range ({len(kinds)})"
            )
        self.pending_actions[agent_id] = action_index

    def spawn(self, group_name: str, x: int, y: int):
        env = self.env
        if group_name not in env._group_ids:
            raise SwarmgridError(f"unknown group {group_name!r}")
        env.world.spawn(
            env._group_ids[group_name], [((x, y), Direction.NORTH)]
        )
        self.obs = env.observe()

    def kill(self, agent_id: int):
        world = self.env.world
        agent = world.get_agent(agent_id)
        spec = agent.spec
        x, y = agent.pos.x, agent.pos.y
        from .core import EMPTY

        world.occupancy[y : y + spec.body_h, x : x + spec.body_w] = EMPTY
        world.a_alive[agent_id] = False
        self.controlled.discard(agent_id)
        self.obs = self.env.observe()


class Session:
    """Engine loop plus client bookkeeping for one served source."""

    def __init__(self, source, speed: float = 4.0, start_paused: bool = False):
        self.source = source
        self.speed = speed
        self.paused = start_paused
        self.finished = False
        self.clients: set = set()
        self.commands: asyncio.Queue = asyncio.Queue()
        self.frames_sent = 0
        self._stop = asyncio.Event()

    # -- command application (between steps only) ---------------------------

    def _apply(self, ws, msg: dict):
        cmd = msg.get("cmd")
        try:
            if not self.source.live and cmd not in REPLAY_ALLOWED:
                raise SwarmgridError(
                    f"command {cmd!r} is not available on a replay source"
                )
            if cmd == "pause":
                self.paused = True
            elif cmd == "resume":
                self.paused = False
            elif cmd == "speed":
                sps = float(msg["steps_per_second"])
                if sps <= 0:
                    raise SwarmgridError("speed must be positive")
                self.speed = sps
            elif cmd == "step":
                self._emit_frame()
            elif cmd == "take":
                self.source.take(int(msg["agent"]))
            elif cmd == "release":
                self.source.release(int(msg["agent"]))
            elif cmd == "act":
                self.source.human_action(int(msg["agent"]), int(msg["action"]))
            elif cmd == "spawn":
                self.source.spawn(msg["group"], int(msg["x"]), int(msg["y"]))
            elif cmd == "kill":
                self.source.kill(int(msg["agent"]))
            elif cmd == "viewport":
                pass  # frames are not culled; accepted for protocol parity
            else:
                raise SwarmgridError(f"unknown command {cmd!r}")
        except (SwarmgridError, KeyError, ValueError) as e:
            self._send(ws, {"t": "error", "msg": str(e)})
            return
        self._send(ws, {"t": "ack", "cmd": cmd})

    def _send(self, ws, obj: dict):
        asyncio.ensure_future(self._safe_send(ws, json.dumps(obj, sort_keys=True)))

    async def _safe_send(self, ws, text: str):
        try:
            await ws.send(text)
        except Exception:
            self.clients.discard(ws)

    def _broadcast(self, text: str):
        for ws in list(self.clients):
            self._send(ws, text if isinstance(text, dict) else text)

    def _emit_frame(self):
        frame = self.source.next_frame()
        if frame is None:
            self.finished = True
            return
        text = frame.to_json()
        for ws in list(self.clients):
            asyncio.ensure_future(self._safe_send(ws, text))
        self.frames_sent += 1

    # -- loop ---------------------------------------------------------------

    async def run_loop(self):
        while not self._stop.is_set():
            while not self.commands.empty():
                ws, msg = self.commands.get_nowait()
                self._apply(ws, msg)
            if not self.paused and not self.finished:
                self._emit_frame()
                await asyncio.sleep(1.0 / self.speed)
            else:
                await asyncio.sleep(0.02)

    def stop(self):
        self._stop.set()

    # -- client handling ----------------------------------------------------

    async def handler(self, ws):
        self.clients.add(ws)
        try:
            await ws.send(self.source.header.to_json())
            async for raw in ws:
                try:
                    msg = json.loads(raw)
                    if msg.get("t") != "control":
                        raise ValueError("expected a control message")
                except (json.JSONDecodeError, ValueError, AttributeError) as e:
                    await ws.send(json.dumps({"t": "error", "msg": str(e)}))
                    continue
                await self.commands.put((ws, msg))
        finally:
            self.clients.discard(ws)


async def serve_session(
    source, port: int, host: str = "127.0.0.1", start_paused: bool = False
):
    """Start a websocket server for one session.

    ``start_paused`` holds the first frame until a client sends resume or
    step, so short sources are not consumed before anyone connects.
    Returns (session, server, loop_task); caller stops with
    ``session.stop(); server.close()``.
    """
    from websockets.asyncio.server import serve as ws_serve

    session = Session(source, start_paused=start_paused)
    server = await ws_serve(session.handler, host, port)
    loop_task = asyncio.create_task(session.run_loop())
    return session, server, loop_task


async def serve_forever(
    source, port: int, host: str = "127.0.0.1", start_paused: bool = False
):
    session, server, loop_task = await serve_session(
        source, port, host, start_paused=start_paused
    )
    try:
        await loop_task
    finally:
        server.close()
        await server.wait_closed()
