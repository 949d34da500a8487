import asyncio
import json

import pytest

from swarmgrid.engine import ATTACK
from swarmgrid.env import load_scenario
from swarmgrid.replay import run_episode
from swarmgrid.serve import LiveSource, ReplaySource, serve_session

from test_env import action_index, duel_config

RECV_TIMEOUT = 5.0


async def recv_json(ws):
    return json.loads(await asyncio.wait_for(ws.recv(), RECV_TIMEOUT))


async def recv_until(ws, kind, limit=50):
    for _ in range(limit):
        msg = await recv_json(ws)
        if msg["t"] == kind:
            return msg
    raise AssertionError(f"no {kind!r} message within {limit} frames")


def serve_and_run(source, scenario):
    """Run an async client scenario against a freshly served source."""

    async def main():
        from websockets.asyncio.client import connect

        session, server, loop_task = await serve_session(
            source, port=0, start_paused=True
        )
        session.speed = 200.0
        port = server.sockets[0].getsockname()[1]
        try:
            async with connect(f"ws://127.0.0.1:{port}") as ws:
                return await scenario(session, ws)
        finally:
            session.stop()
            server.close()
            await server.wait_closed()
            loop_task.cancel()

    return asyncio.run(main())


@pytest.fixture
def replay_path(tmp_path):
    env = load_scenario(duel_config(termination={"max_steps": 5}))
    path = tmp_path / "episode.jsonl"
    with open(path, "w") as f:
        run_episode(env, seed=0, policies={}, record_sink=f)
    return path


class TestReplayServing:
    def test_header_then_all_frames(self, replay_path):
        async def scenario(session, ws):
            header = await recv_json(ws)
            assert header["t"] == "header"
            assert header["width"] == 8
            await ws.send(json.dumps({"t": "control", "cmd": "resume"}))
            steps = []
            for _ in range(5):
                frame = await recv_until(ws, "frame")
                steps.append(frame["step"])
            return steps

        assert serve_and_run(ReplaySource(replay_path), scenario) == [1, 2, 3, 4, 5]

    def test_pause_and_resume(self, replay_path):
        async def scenario(session, ws):
            await recv_json(ws)  # header
            await ws.send(json.dumps({"t": "control", "cmd": "pause"}))
            seen = []
            # drain whatever was in flight, then confirm silence
            while True:
                try:
                    msg = json.loads(await asyncio.wait_for(ws.recv(), 0.3))
                except asyncio.TimeoutError:
                    break
                seen.append(msg)
            assert any(m == {"cmd": "pause", "t": "ack"} for m in seen)
            assert session.paused
            n_before = session.frames_sent
            await asyncio.sleep(0.3)
            assert session.frames_sent == n_before
            await ws.send(json.dumps({"t": "control", "cmd": "resume"}))
            frame = await recv_until(ws, "frame")
            assert frame["t"] == "frame"

        serve_and_run(ReplaySource(replay_path), scenario)

    def test_single_step_while_paused(self, replay_path):
        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps({"t": "control", "cmd": "pause"}))
            await asyncio.sleep(0.2)
            sent_before = session.frames_sent
            await ws.send(json.dumps({"t": "control", "cmd": "step"}))
            await recv_until(ws, "frame")
            await asyncio.sleep(0.2)
            assert session.frames_sent == sent_before + 1

        serve_and_run(ReplaySource(replay_path), scenario)

    def test_mutating_commands_rejected(self, replay_path):
        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "take", "agent": 0}))
            err = await recv_until(ws, "error")
            assert "replay" in err["msg"]

        serve_and_run(ReplaySource(replay_path), scenario)

    def test_invalid_speed_rejected(self, replay_path):
        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "speed", "steps_per_second": -1}))
            err = await recv_until(ws, "error")
            assert "positive" in err["msg"]

        serve_and_run(ReplaySource(replay_path), scenario)

    def test_non_control_message_rejected(self, replay_path):
        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send("this is not json")
            err = await recv_until(ws, "error")
            assert err["t"] == "error"

        serve_and_run(ReplaySource(replay_path), scenario)


def idle(env, batch):
    return [0] * len(batch.ids)


def live_source(**cfg_overrides):
    env = load_scenario(duel_config(**cfg_overrides))
    return LiveSource(env, {"predator": idle, "prey": idle}, seed=0)


class TestLiveServing:
    def test_take_act_produces_commanded_attack(self):
        src = live_source(termination={"max_steps": 500})
        atk = action_index(src.env, "predator", ATTACK, 0, -1)

        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "take", "agent": 0}))
            await recv_until(ws, "ack")
            await ws.send(json.dumps(
                {"t": "control", "cmd": "act", "agent": 0, "action": atk}))
            await recv_until(ws, "ack")
            await ws.send(json.dumps({"t": "control", "cmd": "resume"}))
            # commanded action must land within the next two engine ticks
            for _ in range(2):
                frame = await recv_until(ws, "frame")
                if [0, 1] in frame["events"]["attack"]:
                    return
            raise AssertionError("commanded attack never fired")

        serve_and_run(src, scenario)

    def test_act_without_take_rejected(self):
        src = live_source(termination={"max_steps": 500})

        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "act", "agent": 0, "action": 0}))
            err = await recv_until(ws, "error")
            assert "not under control" in err["msg"]

        serve_and_run(src, scenario)

    def test_spawn_on_wall_rejected(self):
        src = live_source(
            map={"width": 8, "height": 8, "walls": [[5, 5]]},
            termination={"max_steps": 500},
        )

        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "spawn", "group": "prey",
                 "x": 5, "y": 5}))
            err = await recv_until(ws, "error")
            assert "5" in err["msg"]

        serve_and_run(src, scenario)

    def test_spawn_on_free_cell_grows_population(self):
        src = live_source(termination={"max_steps": 500})

        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "spawn", "group": "prey",
                 "x": 6, "y": 6}))
            await recv_until(ws, "ack")
            await ws.send(json.dumps({"t": "control", "cmd": "resume"}))
            for _ in range(5):
                frame = await recv_until(ws, "frame")
                if frame["populations"]["prey"] == 2:
                    return
            raise AssertionError("spawned agent never appeared")

        serve_and_run(src, scenario)

    def test_kill_removes_agent(self):
        src = live_source(termination={"max_steps": 500})

        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "kill", "agent": 1}))
            await recv_until(ws, "ack")
            await ws.send(json.dumps({"t": "control", "cmd": "resume"}))
            for _ in range(5):
                frame = await recv_until(ws, "frame")
                if frame["populations"]["prey"] == 0:
                    return
            raise AssertionError("killed agent still present")

        serve_and_run(src, scenario)

    def test_release_returns_agent_to_policy(self):
        src = live_source(termination={"max_steps": 500})

        async def scenario(session, ws):
            await recv_json(ws)
            await ws.send(json.dumps(
                {"t": "control", "cmd": "take", "agent": 0}))
            await recv_until(ws, "ack")
            await ws.send(json.dumps(
                {"t": "control", "cmd": "release", "agent": 0}))
            await recv_until(ws, "ack")
            assert 0 not in src.controlled

        serve_and_run(src, scenario)
