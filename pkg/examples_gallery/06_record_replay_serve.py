"""Record an episode to a replay file, read it back, and serve it.

Replay files are line-delimited JSON: one header, then one frame per
step.  The same objects travel over the websocket, so a browser client
renders a recording and a live run identically.
"""

import json
import tempfile
from pathlib import Path

from swarmgrid.env import load_scenario
from swarmgrid.replay import read_replay, run_episode
from swarmgrid.scenarios import builtin_scenario

path = Path(tempfile.mkdtemp()) / "battle.jsonl"

env = load_scenario(builtin_scenario("battle", map_size=16, max_steps=60))
with open(path, "w") as sink:
    totals, steps, pops = run_episode(
        env, seed=11,
        policies={"army_a": "chase_nearest", "army_b": "chase_nearest"},
        record_sink=sink,
    )
print(f"recorded {steps} steps to {path}")
print(f"totals {totals}, final populations {pops}")

with open(path) as f:
    reader = read_replay(f)
    frames = list(reader)
print(f"read back: {len(frames)} frames, map "
      f"{reader.header.width}x{reader.header.height}, "
      f"truncated={reader.truncated}")

last = frames[-1]
print(f"final frame: step {last.step}, {len(last.agents)} agents, "
      f"events {json.dumps({k: len(v) for k, v in last.events.items()})}")


# serving the same file over a websocket (any client speaking the wire
# protocol can connect; press Ctrl-C to stop):
#
#   from swarmgrid.serve import ReplaySource, serve_forever
#   asyncio.run(serve_forever(ReplaySource(path), port=8765))
#
# or from the shell:  swarmgrid replay battle.jsonl --serve 8765
