"""Egocentric observations: what a single agent actually sees.

Each view is [channels, H, W] with the agent centered and its facing
rotated to point up: channel 0 marks walls and out-of-bounds cells,
then each group contributes a presence channel and an hp-fraction channel.
"""

import numpy as np

from swarmgrid import AgentTypeSpec, Direction, border_walls, create_world
from swarmgrid.observe import global_minimap, observe_agent, observe_group

world = create_world(10, 10, seed=3)
world.set_walls(border_walls(10, 10))
scout = world.register_agent_type(AgentTypeSpec(name="scout", view_range=2))
group = world.create_group(scout)
world.spawn(group, [((2, 2), Direction.EAST), ((4, 2), Direction.NORTH)])

ob = observe_agent(world, 0)
print(f"view shape {ob.view.shape}, feature length {len(ob.features)}")
print("wall channel (agent is centered, facing rendered up):")
for row in ob.view[0]:
    print("  " + " ".join("#" if v else "." for v in row))
print("own-group presence channel:")
for row in ob.view[1]:
    print("  " + " ".join("O" if v else "." for v in row))

# the feature tail is [id bits, last action one-hot, last reward, x, y]
print(f"normalized position: {ob.features[-2]:.2f}, {ob.features[-1]:.2f}")

# batch extraction returns every living member of a group at once,
# row-aligned with ascending ids
batch = observe_group(world, group)
print(f"batch: ids {batch.ids.tolist()}, views {batch.views.shape}, "
      f"features {batch.features.shape}")

# a coarse global census can be appended to every feature vector
mm = global_minimap(world, bins=2)
print(f"minimap occupancy fractions per group:\n{np.round(mm, 2)}")
