"""Train a parameter-sharing DQN on a tiny pursuit map.

One network is shared by every predator; each agent's id embedding lets
the shared weights specialize per agent.  Runs in well under a minute.
"""

from swarmgrid.dqn import TrainConfig, evaluate_policy, train
from swarmgrid.env import load_scenario
from swarmgrid.scenarios import builtin_scenario

scenario = builtin_scenario(
    "pursuit", map_size=8,
    populations={"predator": 2, "prey": 1},
    max_steps=40, view_range=2,
)

baseline = evaluate_policy(
    load_scenario(scenario), "predator", None, episodes=50, seed=123
)
print(f"random-policy baseline: {baseline:.2f} reward per episode")

cfg = TrainConfig(
    total_steps=10_000, hidden=32, lr=0.005, batch_size=32,
    buffer_capacity=20_000, epsilon_decay_steps=6_000, target_sync=250,
    eval_interval=2_500, eval_episodes=5, learn_start=500, seed=0,
)
result = train(load_scenario(scenario), "predator", cfg)

print("learning curve (greedy evaluation during training):")
for row in result.curve:
    print(f"  step {row['step']:>6}  epsilon {row['epsilon']:.2f}  "
          f"mean reward {row['mean_eval_reward']:.2f}")

final = evaluate_policy(
    load_scenario(scenario), "predator", result.params, episodes=50, seed=123
)
print(f"trained policy: {final:.2f} ({final / max(baseline, 1e-9):.1f}x random)")
