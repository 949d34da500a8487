import numpy as np
import pytest

from swarmgrid.core import AgentTypeSpec, create_world


@pytest.fixture
def duel_world():
    """8x8 world, one predator type group and one prey type group."""
    w = create_world(8, 8, 0)
    pred = w.register_agent_type(
        AgentTypeSpec(name="pred", speed=1, view_range=1, attack_range=1,
                      damage=2.0, max_hp=10.0)
    )
    prey = w.register_agent_type(
        AgentTypeSpec(name="prey", speed=1, view_range=1, attack_range=0,
                      damage=0.0, max_hp=10.0, step_recover=0.5)
    )
    w.create_group(pred)
    w.create_group(prey)
    return w


def snapshots_equal(s1: dict, s2: dict) -> bool:
    if s1.keys() != s2.keys():
        return False
    for k in s1:
        a, b = s1[k], s2[k]
        if isinstance(a, np.ndarray):
            if not np.array_equal(a, b):
                return False
        elif a != b:
            return False
    return True
