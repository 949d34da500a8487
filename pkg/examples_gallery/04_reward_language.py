"""The reward language: declare symbols, bind them to events, pay values.

Rules fire once per distinct binding of their ``any`` symbols; ``all``
symbols quantify universally and pay the whole group; ``k``-indexed
symbols pin the k-th member at step start.
"""

from swarmgrid.dsl import GroupSchema, parse_program, pretty_print, validate
from swarmgrid.env import load_scenario
from swarmgrid.scenarios import builtin_scenario

program_text = """\
symbol hunter: predator[any]
symbol target: prey[any]
symbol herd: prey[all]

# the classic chase incentive: attacker gains what the victim loses
rule on attack(hunter, target) receiver hunter, target value 1, -1

# bonus for finishing a target off inside the pen
rule on kill(hunter, target) and in(target, 0, 0, 7, 7) receiver hunter value 5

# the whole herd is penalized when any member dies
rule on die(target) receiver herd value -0.5
"""

program = parse_program(program_text)
print(f"{len(program.symbols)} symbols, {len(program.rules)} rules")
print("canonical form:")
print(pretty_print(program))

schema = GroupSchema(groups=("predator", "prey"), width=16, height=16)
validate(program, schema)  # raises with every violation listed otherwise
print("validation: ok")

# plug a program into a scenario and watch it pay out: scripted chasers
# guarantee an attack lands within a few steps
from swarmgrid.dqn import scripted_policy

env = load_scenario(builtin_scenario("pursuit", map_size=12, max_steps=50))
env.reset(seed=1)
while True:
    acts = {
        "predator": scripted_policy(
            "chase_nearest", env.world, env._group_ids["predator"]
        )
    }
    res = env.step(acts)
    paid = {g: float(r.sum()) for g, r in res.rewards.items() if r.sum()}
    if paid or res.done:
        print(f"step {res.info['step_count']}: rewards {paid}")
        break
