import numpy as np
import pytest

from swarmgrid.core import AgentTypeSpec, Direction, create_world
from swarmgrid.errors import UnknownIdError
from swarmgrid.observe import (
    global_minimap,
    id_embedding,
    observe_agent,
    observe_group,
)


class TestIdEmbedding:
    def test_zero_id(self):
        assert id_embedding(0, 10).tolist() == [0.0] * 10

    def test_binary_expansion_of_five(self):
        assert id_embedding(5, 4).tolist() == [1.0, 0.0, 1.0, 0.0]

    def test_wraparound(self):
        assert id_embedding(16, 4).tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_length(self):
        assert len(id_embedding(12345, 7)) == 7


def lone_world(size=5, view_range=1, facing=Direction.NORTH, pos=(2, 2)):
    w = create_world(size, size, 0)
    t = w.register_agent_type(
        AgentTypeSpec(name="a", view_range=view_range, max_hp=10.0)
    )
    g = w.create_group(t)
    w.spawn(g, [(pos, facing)])
    return w


class TestObserveAgent:
    def test_isolated_agent_3x3(self):
        w = lone_world()
        ob = observe_agent(w, 0)
        assert ob.view.shape == (3, 3, 3)
        assert (ob.view[0] == 0).all()  # no walls
        presence = np.zeros((3, 3), dtype=np.float32)
        presence[1, 1] = 1.0
        assert np.array_equal(ob.view[1], presence)
        assert np.array_equal(ob.view[2], presence)  # full hp

    def test_golden_facing_east_wall_ahead(self):
        w = lone_world(facing=Direction.EAST)
        w.set_walls([(3, 2)])  # one cell east of the agent
        ob = observe_agent(w, 0)
        expected_walls = np.array(
            [[0, 1, 0],
             [0, 0, 0],
             [0, 0, 0]], dtype=np.float32)
        assert np.array_equal(ob.view[0], expected_walls)

    def test_golden_boundary_clamp(self):
        w = lone_world(view_range=2, pos=(0, 0))
        ob = observe_agent(w, 0)
        expected_walls = np.array(
            [[1, 1, 1, 1, 1],
             [1, 1, 1, 1, 1],
             [1, 1, 0, 0, 0],
             [1, 1, 0, 0, 0],
             [1, 1, 0, 0, 0]], dtype=np.float32)
        assert np.array_equal(ob.view[0], expected_walls)
        assert ob.view[1, 2, 2] == 1.0

    def test_golden_multi_group_hp_channel(self):
        w = create_world(7, 7, 0)
        ta = w.register_agent_type(AgentTypeSpec(name="a", view_range=1, max_hp=10.0))
        tb = w.register_agent_type(AgentTypeSpec(name="b", view_range=1, max_hp=10.0))
        ga = w.create_group(ta)
        gb = w.create_group(tb)
        w.spawn(ga, [((3, 3), Direction.NORTH)])
        w.spawn(gb, [((4, 3), Direction.NORTH)])
        w.a_hp[1] = 2.5
        ob = observe_agent(w, 0)
        assert ob.view.shape == (5, 3, 3)
        own_presence = np.zeros((3, 3), dtype=np.float32)
        own_presence[1, 1] = 1.0
        other_presence = np.zeros((3, 3), dtype=np.float32)
        other_presence[1, 2] = 1.0  # east of center, facing north
        assert np.array_equal(ob.view[1], own_presence)
        assert np.array_equal(ob.view[2], own_presence)
        assert np.array_equal(ob.view[3], other_presence)
        assert np.array_equal(ob.view[4], 0.25 * other_presence)

    def test_feature_layout(self):
        w = lone_world()
        w.a_last_reward[0] = -2.5
        ob = observe_agent(w, 0, id_bits=4)
        n_actions = 19  # speed 1, attack_range 1
        assert len(ob.features) == 4 + n_actions + 3
        assert ob.features[:4].tolist() == [0, 0, 0, 0]
        assert ob.features[4] == 1.0  # last action no-op one-hot
        assert ob.features[4 + n_actions] == -2.5
        assert np.allclose(ob.features[-2:], [2 / 5, 2 / 5])

    def test_dead_agent_lookup_error(self):
        w = lone_world()
        w.a_alive[0] = False
        with pytest.raises(UnknownIdError):
            observe_agent(w, 0)


def rotated_copy(w):
    """World with contents rotated 90 deg clockwise and facings advanced."""
    size = w.width
    w2 = create_world(size, size, 0)
    for t in w.types:
        w2.register_agent_type(t)
    for tid in w.groups:
        w2.create_group(tid)
    walls = [
        (size - 1 - y, x)
        for y in range(size)
        for x in range(size)
        if w.occupancy[y, x] == -2
    ]
    w2.set_walls(walls)
    for a in w.agents():
        nx, ny = size - 1 - a.pos.y, a.pos.x
        w2.spawn(a.group, [((nx, ny), Direction((int(a.dir) + 1) % 4))])
    w2.a_hp[: w2._n] = w.a_hp[: w._n]
    return w2


class TestObservationProperties:
    def test_rotation_consistency(self):
        rng = np.random.default_rng(11)
        for trial in range(10):
            w = create_world(9, 9, trial)
            t = w.register_agent_type(AgentTypeSpec(name="a", view_range=2))
            g = w.create_group(t)
            cells = [(int(x), int(y)) for x in range(9) for y in range(9)]
            rng.shuffle(cells)
            w.set_walls(cells[:8])
            spawned = 0
            for x, y in cells[8:]:
                if spawned >= 6:
                    break
                if w.occupancy[y, x] == -1:
                    w.spawn(g, [((x, y), Direction(int(rng.integers(0, 4))))])
                    spawned += 1
            w2 = rotated_copy(w)
            for a in w.agents():
                v1 = observe_agent(w, a.id).view
                v2 = observe_agent(w2, a.id).view
                assert np.array_equal(v1, v2)

    def test_locality_outside_window(self):
        w = lone_world(size=9, view_range=1, pos=(4, 4))
        before = observe_agent(w, 0).view.copy()
        w.set_walls([(0, 0), (8, 8), (7, 4)])  # all outside the 3x3 window
        assert np.array_equal(observe_agent(w, 0).view, before)

    def test_batch_row_equivalence(self):
        w = create_world(12, 12, 3)
        t = w.register_agent_type(AgentTypeSpec(name="a", view_range=2))
        g = w.create_group(t)
        w.spawn(g, 8)
        batch = observe_group(w, g)
        assert len(batch.ids) == 8
        for row, aid in enumerate(batch.ids):
            ob = observe_agent(w, int(aid))
            assert np.array_equal(batch.views[row], ob.view)
            assert np.allclose(batch.features[row], ob.features)

    def test_batch_after_death_shrinks(self):
        w = create_world(12, 12, 3)
        t = w.register_agent_type(AgentTypeSpec(name="a", view_range=1))
        g = w.create_group(t)
        w.spawn(g, 4)
        w.a_alive[2] = False
        w.occupancy[w.occupancy == 2] = -1
        batch = observe_group(w, g)
        assert len(batch.ids) == 3
        assert 2 not in batch.ids

    def test_empty_group_dimensions(self):
        w = create_world(8, 8, 0)
        t = w.register_agent_type(AgentTypeSpec(name="a", view_range=1))
        g = w.create_group(t)
        batch = observe_group(w, g, id_bits=10)
        assert batch.views.shape == (0, 3, 3, 3)
        assert batch.features.shape == (0, 10 + 19 + 3)

    def test_value_bounds(self):
        w = create_world(10, 10, 4)
        t = w.register_agent_type(AgentTypeSpec(name="a", view_range=2,
                                                max_hp=8.0))
        g = w.create_group(t)
        w.spawn(g, 10)
        w.a_hp[:10] = np.linspace(1, 8, 10)
        batch = observe_group(w, g)
        assert (batch.views >= 0).all() and (batch.views <= 1).all()
        presence = batch.views[:, 1]
        assert set(np.unique(presence)) <= {0.0, 1.0}


class TestMinimap:
    def test_single_agent_single_bin(self):
        w = lone_world()
        mm = global_minimap(w, 1)
        assert mm.tolist() == [[[1.0]]]

    def test_four_quadrants(self):
        w = create_world(8, 8, 0)
        t = w.register_agent_type(AgentTypeSpec(name="a"))
        g = w.create_group(t)
        for pos in [(1, 1), (6, 1), (1, 6), (6, 6)]:
            w.spawn(g, [(pos, Direction.NORTH)])
        mm = global_minimap(w, 2)
        assert np.allclose(mm[0], 0.25)

    def test_extinct_group_zero_channel(self):
        w = create_world(8, 8, 0)
        t = w.register_agent_type(AgentTypeSpec(name="a"))
        w.create_group(t)
        w.create_group(t)
        w.spawn(0, 2)
        mm = global_minimap(w, 4)
        assert mm[0].sum() == 1.0
        assert (mm[1] == 0).all()

    def test_appended_to_features_identically(self):
        w = create_world(8, 8, 0)
        t = w.register_agent_type(AgentTypeSpec(name="a"))
        g = w.create_group(t)
        w.spawn(g, 3)
        batch = observe_group(w, g, minimap_bins=2)
        tail = batch.features[:, -4 * len(w.groups):]
        assert np.allclose(tail, tail[0])
