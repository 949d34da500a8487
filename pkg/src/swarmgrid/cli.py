"""Command-line entry point: run, train, check, bench, replay.

Exit codes: 0 success, 1 user/config error, 2 runtime failure.  The env
var SWARMGRID_SEED supplies the default seed.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dsl
from .bench import run_bench
from .dqn import (
    TrainConfig,
    act_epsilon_greedy,
    flatten_batch,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .env import load_scenario
from .errors import (
    CapacityError,
    DslError,
    DslValidationError,
    InvalidActionError,
    InvalidConfigError,
    PlacementError,
    ReplayFormatError,
    SwarmgridError,
    TrainingDivergenceError,
    UnknownIdError,
)
from .replay import read_replay, run_episode
from .scenarios import SCENARIO_NAMES, builtin_scenario

USER_ERRORS = (
    InvalidConfigError, DslError, DslValidationError, PlacementError,
    CapacityError, UnknownIdError, InvalidActionError, ReplayFormatError,
    FileNotFoundError,
)


def _default_seed() -> int:
    return int(os.environ.get("SWARMGRID_SEED", "0"))


def _resolve_scenario(name_or_path: str, map_size: int, max_steps: int) -> str:
    if name_or_path in SCENARIO_NAMES:
        return builtin_scenario(name_or_path, map_size=map_size, max_steps=max_steps)
    return Path(name_or_path).read_text()


def _parse_policies(specs: list[str]) -> dict:
    """group=policy pairs; policy is random, chase_nearest, or a checkpoint."""
    policies = {}
    for item in specs or []:
        if "=" not in item:
            raise InvalidConfigError(
                f"--policy expects group=policy, got {item!r}"
            )
        group, pol = item.split("=", 1)
        if pol in ("stay", "random", "chase_nearest"):
            policies[group] = pol
        else:
            params, _meta = load_checkpoint(pol)

            def greedy(env, batch, _p=params):
                rng = np.random.default_rng(0)
                return act_epsilon_greedy(_p, flatten_batch(batch), 0.0, rng)

            policies[group] = greedy
    return policies


def _emit(summary: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(summary, sort_keys=True))
        return
    for k, v in summary.items():
        print(f"{k}: {v}")


# -- subcommands -------------------------------------------------------------

def cmd_run(args) -> int:
    config_text = _resolve_scenario(args.scenario, args.map_size, args.steps)
    policies = _parse_policies(args.policy)
    env = load_scenario(config_text)

    if args.serve is not None:
        return _run_serving(env, args, policies)

    mean_rewards = {g: 0.0 for g in env.group_names}
    last_pops = {}
    total_steps = 0
    for ep in range(args.episodes):
        seed = args.seed + ep
        sink = open(args.record, "w") if args.record and ep == 0 else None
        try:
            totals, steps, pops = run_episode(
                env, seed, policies, max_steps=args.steps, record_sink=sink
            )
        finally:
            if sink:
                sink.close()
        for g, v in totals.items():
            mean_rewards[g] += v / args.episodes
        last_pops = pops
        total_steps += steps
    summary = {
        "scenario": args.scenario,
        "seed": args.seed,
        "episodes": args.episodes,
        "steps": total_steps,
        "mean_reward": {g: round(v, 6) for g, v in mean_rewards.items()},
        "final_populations": last_pops,
    }
    _emit(summary, args.json)
    return 0


def _run_serving(env, args, policies) -> int:
    from .serve import LiveSource, serve_session

    async def main():
        source = LiveSource(env, policies, args.seed)
        if args.record:
            sink = open(args.record, "w")
            from .replay import ReplayWriter

            writer = ReplayWriter(sink, source.header)
            inner = source.next_frame

            def recording_next():
                frame = inner()
                if frame is not None:
                    writer.write_frame(frame)
                return frame

            source.next_frame = recording_next
        session, server, loop_task = await serve_session(
            source, args.serve, start_paused=args.paused
        )
        print(f"serving live {args.scenario} on ws://127.0.0.1:{args.serve}")
        try:
            while not session.finished:
                await asyncio.sleep(0.1)
        finally:
            session.stop()
            server.close()
            await server.wait_closed()
            if args.record:
                writer.close()
                sink.close()
    asyncio.run(main())
    return 0


def cmd_train(args) -> int:
    config_text = _resolve_scenario(args.scenario, args.map_size, args.episode_steps)
    env = load_scenario(config_text)
    if args.group not in env.group_names:
        raise InvalidConfigError(
            f"unknown group {args.group!r}; scenario has {env.group_names}"
        )
    cfg = TrainConfig(
        gamma=args.gamma, lr=args.lr, batch_size=args.batch_size,
        buffer_capacity=args.buffer, epsilon_start=args.eps_start,
        epsilon_end=args.eps_end, epsilon_decay_steps=args.eps_decay,
        target_sync=args.target_sync, hidden=args.hidden,
        total_steps=args.total_steps, eval_episodes=args.eval_episodes,
        eval_interval=args.eval_interval, seed=args.seed,
    )

    def write_curve(curve):
        with open(args.curve, "w") as f:
            f.write("step,epsilon,mean_eval_reward\n")
            for row in curve:
                f.write(
                    f"{row['step']},{row['epsilon']},{row['mean_eval_reward']}\n"
                )

    try:
        result = train(env, args.group, cfg)
    except TrainingDivergenceError as e:
        write_curve(e.curve)
        print(f"training diverged: {e}", file=sys.stderr)
        return 2
    flags = {k: v for k, v in vars(args).items()
             if k not in ("func", "json") and not callable(v)}
    meta = {
        "scenario": args.scenario, "group": args.group,
        "train_config": flags,
    }
    save_checkpoint(args.out, result.params, meta)
    write_curve(result.curve)
    summary = {
        "checkpoint": args.out,
        "curve": args.curve,
        "evaluations": len(result.curve),
        "final_eval_reward": (
            result.curve[-1]["mean_eval_reward"] if result.curve else None
        ),
    }
    _emit(summary, args.json)
    return 0


def cmd_check(args) -> int:
    text = Path(args.dsl_file).read_text()
    program = dsl.parse_program(text)
    if args.schema:
        config_text = _resolve_scenario(args.schema, 64, 300)
        config = json.loads(config_text)
        schema = dsl.GroupSchema(
            groups=tuple(g["name"] for g in config["groups"]),
            width=config["map"]["width"],
            height=config["map"]["height"],
        )
        dsl.validate(program, schema)
    _emit(
        {"file": args.dsl_file, "symbols": len(program.symbols),
         "rules": len(program.rules), "status": "ok"},
        args.json,
    )
    return 0


def cmd_bench(args) -> int:
    report = run_bench(
        agents=args.agents, map_size=args.map, steps=args.steps,
        seed=args.seed, observations=args.obs, view_range=args.view_range,
    )
    _emit(report, args.json)
    return 0


def cmd_replay(args) -> int:
    if args.serve is not None:
        from .serve import ReplaySource, serve_forever

        source = ReplaySource(args.file)
        print(f"serving replay {args.file} on ws://127.0.0.1:{args.serve}")
        asyncio.run(serve_forever(source, args.serve, start_paused=args.paused))
        return 0
    with open(args.file) as f:
        reader = read_replay(f)
        frames = 0
        last = None
        for frame in reader:
            frames += 1
            last = frame
    summary = {
        "file": args.file,
        "frames": frames,
        "final_step": last.step if last else None,
        "final_populations": last.populations if last else {},
        "truncated": reader.truncated,
    }
    _emit(summary, args.json)
    if reader.truncated:
        print("replay file is truncated", file=sys.stderr)
        return 2
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="swarmgrid",
        description="Many-agent gridworld platform: simulate, train, replay.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run episodes of a scenario")
    run.add_argument("scenario", help="built-in name or config file path")
    run.add_argument("--seed", type=int, default=_default_seed())
    run.add_argument("--steps", type=int, default=300, help="max steps per episode")
    run.add_argument("--episodes", type=int, default=1)
    run.add_argument("--map-size", type=int, default=64)
    run.add_argument(
        "--policy", nargs="*", metavar="GROUP=POLICY",
        help="stay, random, chase_nearest, or a checkpoint path",
    )
    run.add_argument("--record", metavar="PATH", help="write a replay file")
    run.add_argument("--serve", type=int, metavar="PORT", help="serve live over websocket")
    run.add_argument("--paused", action="store_true",
                     help="hold the first frame until a client resumes")
    run.add_argument("--json", action="store_true", help="machine-readable summary")
    run.set_defaults(func=cmd_run)

    tr = sub.add_parser("train", help="train a parameter-sharing DQN for one group")
    tr.add_argument("scenario")
    tr.add_argument("group")
    tr.add_argument("--out", default="model.npz", metavar="CKPT")
    tr.add_argument("--curve", default="curve.csv", metavar="CSV")
    tr.add_argument("--seed", type=int, default=_default_seed())
    tr.add_argument("--map-size", type=int, default=16)
    tr.add_argument("--episode-steps", type=int, default=100)
    tr.add_argument("--total-steps", type=int, default=100_000)
    tr.add_argument("--gamma", type=float, default=0.95)
    tr.add_argument("--lr", type=float, default=0.01)
    tr.add_argument("--batch-size", type=int, default=32)
    tr.add_argument("--buffer", type=int, default=50_000)
    tr.add_argument("--eps-start", type=float, default=1.0)
    tr.add_argument("--eps-end", type=float, default=0.05)
    tr.add_argument("--eps-decay", type=int, default=30_000)
    tr.add_argument("--target-sync", type=int, default=500)
    tr.add_argument("--hidden", type=int, default=64)
    tr.add_argument("--eval-episodes", type=int, default=20)
    tr.add_argument("--eval-interval", type=int, default=10_000)
    tr.add_argument("--json", action="store_true")
    tr.set_defaults(func=cmd_train)

    ck = sub.add_parser("check", help="parse and validate a reward DSL file")
    ck.add_argument("dsl_file")
    ck.add_argument("--schema", metavar="SCENARIO",
                    help="scenario (name or path) to validate symbols against")
    ck.add_argument("--json", action="store_true")
    ck.set_defaults(func=cmd_check)

    be = sub.add_parser("bench", help="random-action throughput benchmark")
    be.add_argument("--agents", type=int, required=True)
    be.add_argument("--map", type=int, required=True)
    be.add_argument("--steps", type=int, default=50)
    be.add_argument("--seed", type=int, default=_default_seed())
    be.add_argument("--obs", action="store_true",
                    help="include observation extraction")
    be.add_argument("--view-range", type=int, default=3)
    be.add_argument("--json", action="store_true")
    be.set_defaults(func=cmd_bench)

    rp = sub.add_parser("replay", help="summarize or serve a replay file")
    rp.add_argument("file")
    rp.add_argument("--serve", type=int, metavar="PORT")
    rp.add_argument("--paused", action="store_true",
                    help="hold the first frame until a client resumes")
    rp.add_argument("--summary", action="store_true",
                    help="print the summary (default when not serving)")
    rp.add_argument("--json", action="store_true")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USER_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SwarmgridError as e:
        print(f"runtime failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
