"""Built-in scenario configurations: pursuit, gathering, battle.

Reward values for gathering and battle are calibration choices that encode
the intended incentives (eat-or-fight dilemma, dense cross-team shaping);
pursuit's rule is the canonical +1/-1 attack rule.
"""

from __future__ import annotations

import json

from .errors import UnknownIdError

PURSUIT_PROGRAM = """\
symbol a: predator[any]
symbol b: prey[any]
rule on attack(a, b) receiver a, b value 1, -1
"""

GATHERING_PROGRAM = """\
symbol a: agent[any]
symbol b: agent[any]
symbol f: food[any]
rule on attack(a, f) receiver a value 0.5
rule on kill(a, f) receiver a value 5
rule on attack(a, b) receiver a, b value 1, -5
"""

BATTLE_PROGRAM = """\
symbol a: army_a[any]
symbol b: army_b[any]
rule on attack(a, b) receiver a value 0.2
rule on attack(b, a) receiver b value 0.2
rule on kill(a, b) receiver a value 5
rule on kill(b, a) receiver b value 5
rule on die(a) receiver a value -1
rule on die(b) receiver b value -1
"""

SCENARIO_NAMES = ("pursuit", "gathering", "battle")


def builtin_scenario(
    name: str,
    map_size: int = 64,
    populations: dict | None = None,
    max_steps: int = 300,
    minimap: bool = False,
    view_range: int = 3,
) -> str:
    """Emit a complete scenario config (JSON text) for a built-in game."""
    if name == "pursuit":
        pops = populations or {"predator": max(2, map_size**2 // 64),
                               "prey": max(1, map_size**2 // 128)}
        config = {
            "scenario": "pursuit",
            "map": {"width": map_size, "height": map_size, "walls": "border"},
            "types": [
                {"name": "predator", "speed": 1, "view_range": view_range,
                 "attack_range": 1, "damage": 2, "max_hp": 10,
                 "step_recover": 0},
                {"name": "prey", "speed": 1, "view_range": view_range,
                 "attack_range": 0, "damage": 0, "max_hp": 10,
                 "step_recover": 0.5},
            ],
            "groups": [
                {"name": "predator", "type": "predator",
                 "spawn": {"count": pops["predator"]}},
                {"name": "prey", "type": "prey",
                 "spawn": {"count": pops["prey"]}},
            ],
            "reward_program": PURSUIT_PROGRAM,
            "termination": {"max_steps": max_steps, "done_when": "either",
                            "extinct_groups": ["prey"]},
        }
    elif name == "gathering":
        pops = populations or {"agent": max(2, map_size**2 // 64),
                               "food": max(4, map_size**2 // 32)}
        config = {
            "scenario": "gathering",
            "map": {"width": map_size, "height": map_size, "walls": "border"},
            "types": [
                {"name": "agent", "speed": 1, "view_range": view_range,
                 "attack_range": 1, "damage": 3, "max_hp": 10,
                 "step_recover": 0},
                {"name": "food", "speed": 0, "view_range": 0,
                 "attack_range": 0, "damage": 0, "max_hp": 3,
                 "step_recover": 0},
            ],
            "groups": [
                {"name": "agent", "type": "agent",
                 "spawn": {"count": pops["agent"]}},
                {"name": "food", "type": "food",
                 "spawn": {"count": pops["food"]}},
            ],
            "reward_program": GATHERING_PROGRAM,
            "termination": {"max_steps": max_steps, "done_when": "either",
                            "extinct_groups": ["food"]},
        }
    elif name == "battle":
        per_army = max(2, map_size**2 // 64)
        pops = populations or {"army_a": per_army, "army_b": per_army}
        config = {
            "scenario": "battle",
            "map": {"width": map_size, "height": map_size, "walls": "border"},
            "types": [
                {"name": "soldier", "speed": 1, "view_range": view_range,
                 "attack_range": 1, "damage": 2, "max_hp": 10,
                 "step_recover": 0.1},
            ],
            "groups": [
                {"name": "army_a", "type": "soldier",
                 "spawn": {"count": pops["army_a"]}},
                {"name": "army_b", "type": "soldier",
                 "spawn": {"count": pops["army_b"]}},
            ],
            "reward_program": BATTLE_PROGRAM,
            "termination": {"max_steps": max_steps, "done_when": "either",
                            "extinct_groups": ["army_a", "army_b"]},
        }
    else:
        raise UnknownIdError(
            f"unknown scenario {name!r}; known: {', '.join(SCENARIO_NAMES)}"
        )
    if minimap:
        config["observation"] = {"minimap": True, "bins": 8}
    return json.dumps(config, indent=2)
