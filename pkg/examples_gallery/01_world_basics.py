"""Build a world by hand: types, groups, walls, spawning, queries.

Everything here is deterministic: the world owns a seeded generator and
random spawns draw only from it.
"""

from swarmgrid import AgentTypeSpec, Direction, border_walls, create_world

world = create_world(16, 16, seed=7)
world.set_walls(border_walls(16, 16))

wolf = world.register_agent_type(
    AgentTypeSpec(name="wolf", speed=1, view_range=3, attack_range=1,
                  damage=2.0, max_hp=10.0)
)
sheep = world.register_agent_type(
    AgentTypeSpec(name="sheep", speed=1, view_range=2, attack_range=0,
                  damage=0.0, max_hp=8.0, step_recover=0.5)
)

pack = world.create_group(wolf)
flock = world.create_group(sheep)

# explicit placement: list of ((x, y), facing)
world.spawn(pack, [((3, 3), Direction.EAST), ((3, 5), Direction.SOUTH)])
# random placement: just a count; collision-free cells are drawn from the rng
world.spawn(flock, 6)

print(f"alive: {world.num_alive()} "
      f"({world.num_alive(pack)} wolves, {world.num_alive(flock)} sheep)")

for agent in world.agents():
    print(f"  id {agent.id}: group {agent.group} at "
          f"({agent.pos.x},{agent.pos.y}) facing {agent.dir.name} "
          f"hp {agent.hp:.0f}")

# rectangular queries return ascending ids of agents intersecting the box
upper_left = world.query_rect(0, 0, 7, 7)
print(f"agents in the upper-left quadrant: {upper_left}")
