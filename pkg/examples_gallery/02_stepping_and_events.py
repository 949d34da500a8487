"""Step the engine directly and watch the event log.

Actions are indices into a per-type canonical table: do-nothing, the two
turns, then the move window, then the attack window.  Move and attack
offsets are egocentric (rotated by the actor's facing).
"""

from swarmgrid import AgentTypeSpec, Direction, create_world
from swarmgrid.engine import ATTACK, MOVE, action_space, step

world = create_world(8, 8, seed=0)
fighter = world.register_agent_type(
    AgentTypeSpec(name="fighter", speed=1, attack_range=1, damage=6.0,
                  max_hp=10.0)
)
group = world.create_group(fighter)
world.spawn(group, [((2, 2), Direction.NORTH), ((2, 1), Direction.SOUTH)])

table = action_space(world.types[fighter])
print(f"{len(table)} actions for this type")


def find(kind, dx, dy):
    return next(i for i, a in enumerate(table)
                if a.kind == kind and (a.dx, a.dy) == (dx, dy))


# agent 0 faces north, so ego offset (0,-1) is the cell ahead: (2,1)
hit_ahead = find(ATTACK, 0, -1)

log = step(world, {0: hit_ahead, 1: hit_ahead})
print(f"after step 1: attacks={log.attacks} dies={log.dies}")

# both hit (simultaneous, from pre-step positions); 6+6 damage over two
# steps kills agent 1, and agent 0 gets the kill credit
log = step(world, {0: hit_ahead})
print(f"after step 2: attacks={log.attacks} kills={log.kills}")
print(f"survivors: {[a.id for a in world.agents()]}")

# moves resolve sequentially in a seeded random order; blocked moves
# become collide events instead of displacements
forward = find(MOVE, 0, -1)
log = step(world, {0: forward})
agent = world.get_agent(0)
print(f"agent 0 moved to ({agent.pos.x},{agent.pos.y}), "
      f"collisions: {log.collides}")
