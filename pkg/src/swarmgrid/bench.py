"""Throughput benchmark: random-action stepping at scale, observations
toggleable.  Reports steps/second and peak resident memory."""

from __future__ import annotations

import resource
import time

from .core import AgentTypeSpec, create_world
from .engine import action_space, step
from .errors import CapacityError
from .observe import observe_group


def run_bench(
    agents: int,
    map_size: int,
    steps: int,
    seed: int = 0,
    observations: bool = False,
    view_range: int = 3,
    warmup_steps: int = 2,
) -> dict:
    if agents > map_size * map_size:
        raise CapacityError(
            f"{agents} agents cannot fit on a {map_size}x{map_size} map"
        )
    world = create_world(map_size, map_size, seed)
    spec = AgentTypeSpec(
        name="bench", speed=1, view_range=view_range, attack_range=1,
        damage=1.0, max_hp=1000.0, step_recover=0.0,
    )
    group = world.create_group(world.register_agent_type(spec))
    world.spawn(group, agents)
    n_actions = len(action_space(spec))

    def one_step():
        live = world.live_ids()
        actions = world.rng.integers(0, n_actions, size=len(live))
        step(world, actions)
        if observations:
            observe_group(world, group)

    for _ in range(warmup_steps):  # jit compile outside the timed region
        one_step()
    t0 = time.perf_counter()
    for _ in range(steps):
        one_step()
    elapsed = time.perf_counter() - t0
    peak_rss_mib = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    return {
        "agents": agents,
        "map": map_size,
        "steps": steps,
        "observations": observations,
        "elapsed_seconds": round(elapsed, 4),
        "steps_per_second": round(steps / elapsed, 2),
        "peak_rss_mib": round(peak_rss_mib, 1),
        "final_population": world.num_alive(),
    }
