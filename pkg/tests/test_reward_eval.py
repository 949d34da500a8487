import string
from dataclasses import dataclass, field

import numpy as np
import pytest

from swarmgrid.dsl import GroupSchema, parse_program, pretty_print, validate
from swarmgrid.errors import DslValidationError, OracleTooLargeError
from swarmgrid.reward_eval import (
    RewardSnapshot,
    brute_force_evaluate,
    evaluate,
)


@dataclass
class FakeLog:
    """Stands in for an engine event log during evaluator tests."""

    attacks: list = field(default_factory=list)
    kills: list = field(default_factory=list)
    dies: list = field(default_factory=list)
    collides: list = field(default_factory=list)


def snap(members, pos=None):
    if pos is None:
        pos = {}
        for ids in members.values():
            for i in ids:
                pos[i] = (i % 8, i // 8)
    return RewardSnapshot(members=members, pos=pos)


PURSUIT = parse_program(
    "symbol a: predator[any]\nsymbol b: prey[any]\n"
    "rule on attack(a, b) receiver a, b value 1, -1"
)


class TestEvaluateBasics:
    def test_empty_log_no_rewards(self):
        s = snap({"predator": (0, 1), "prey": (2, 3)})
        assert evaluate(PURSUIT, FakeLog(), s) == {}

    def test_single_attack_pays_both_sides(self):
        s = snap({"predator": (0, 1), "prey": (2, 3)})
        log = FakeLog(attacks=[(0, 2)])
        assert evaluate(PURSUIT, log, s) == {0: 1.0, 2: -1.0}

    def test_fires_once_per_binding(self):
        s = snap({"predator": (0, 1), "prey": (2, 3)})
        log = FakeLog(attacks=[(0, 2), (0, 3), (1, 2)])
        assert evaluate(PURSUIT, log, s) == {0: 2.0, 1: 1.0, 2: -2.0, 3: -1.0}

    def test_cross_group_attack_ignored(self):
        # prey attacking predator does not match (a, b) ordering
        s = snap({"predator": (0,), "prey": (2,)})
        assert evaluate(PURSUIT, FakeLog(attacks=[(2, 0)]), s) == {}

    def test_rules_are_additive(self):
        p = parse_program(
            "symbol a: g[any]\n"
            "rule on die(a) receiver a value -1\n"
            "rule on die(a) receiver a value -0.5\n"
        )
        s = snap({"g": (0, 1)})
        assert evaluate(p, FakeLog(dies=[0]), s) == {0: -1.5}

    def test_concrete_symbol_binds_kth_member(self):
        p = parse_program(
            "symbol lead: g[1]\nrule on die(lead) receiver lead value -3"
        )
        s = snap({"g": (4, 7, 9)})
        assert evaluate(p, FakeLog(dies=[7]), s) == {7: -3.0}
        assert evaluate(p, FakeLog(dies=[4]), s) == {}

    def test_concrete_symbol_infeasible_skips_rule(self):
        p = parse_program(
            "symbol lead: g[5]\nrule on die(lead) receiver lead value -3"
        )
        s = snap({"g": (0, 1)})
        assert evaluate(p, FakeLog(dies=[0]), s) == {}

    def test_all_receiver_pays_whole_group(self):
        p = parse_program(
            "symbol a: g[any]\nsymbol team: g[all]\n"
            "rule on die(a) receiver team value -1"
        )
        s = snap({"g": (0, 1, 2)})
        assert evaluate(p, FakeLog(dies=[1]), s) == {0: -1.0, 1: -1.0, 2: -1.0}

    def test_all_trigger_requires_every_member(self):
        p = parse_program(
            "symbol team: g[all]\nsymbol w: g[0]\n"
            "rule on die(team) receiver w value 1"
        )
        s = snap({"g": (0, 1)})
        assert evaluate(p, FakeLog(dies=[0]), s) == {}
        assert evaluate(p, FakeLog(dies=[0, 1]), s) == {0: 1.0}

    def test_in_region_uses_end_positions(self):
        p = parse_program(
            "symbol a: g[any]\nrule on in(a, 0, 0, 3, 3) receiver a value 2"
        )
        s = snap({"g": (0, 1)}, pos={0: (1, 1), 1: (6, 6)})
        assert evaluate(p, FakeLog(), s) == {0: 2.0}

    def test_safe_negation_filters(self):
        p = parse_program(
            "symbol a: g[any]\n"
            "rule on die(a) and not in(a, 0, 0, 3, 3) receiver a value 1"
        )
        s = snap({"g": (0, 1)}, pos={0: (1, 1), 1: (6, 6)})
        assert evaluate(p, FakeLog(dies=[0, 1]), s) == {1: 1.0}

    def test_contradiction_is_noop(self):
        p = parse_program(
            "symbol a: g[any]\n"
            "rule on die(a) and not die(a) receiver a value 5"
        )
        s = snap({"g": (0, 1)})
        assert evaluate(p, FakeLog(dies=[0]), s) == {}

    def test_event_order_independence(self):
        s = snap({"predator": (0, 1), "prey": (2, 3)})
        l1 = FakeLog(attacks=[(0, 2), (1, 3)])
        l2 = FakeLog(attacks=[(1, 3), (0, 2)])
        assert evaluate(PURSUIT, l1, s) == evaluate(PURSUIT, l2, s)

    def test_wall_collisions_excluded_from_collide(self):
        p = parse_program(
            "symbol a: g[any]\nsymbol b: g[any]\n"
            "rule on collide(a, b) receiver a value -1"
        )
        s = snap({"g": (0, 1)})
        assert evaluate(p, FakeLog(collides=[(0, -1)]), s) == {}
        assert evaluate(p, FakeLog(collides=[(0, 1)]), s) == {0: -1.0}

    def test_oracle_guard_trips(self):
        p = parse_program(
            "symbol a: g[any]\nsymbol b: g[any]\nsymbol c: g[any]\n"
            "rule on attack(a, b) and attack(b, c) receiver a value 1"
        )
        s = snap({"g": tuple(range(101))})
        with pytest.raises(OracleTooLargeError):
            brute_force_evaluate(p, FakeLog(), s)


# -- fuzz campaign: evaluate against the brute-force oracle -------------------

EVENT_KINDS = ("attack", "kill", "collide", "die", "in")


def _gen_expr(rng, names, depth):
    if depth == 0 or rng.random() < 0.4:
        kind = EVENT_KINDS[rng.integers(0, len(EVENT_KINDS))]
        if kind == "die":
            return f"die({rng.choice(names)})"
        if kind == "in":
            x0, x1 = sorted(int(v) for v in rng.integers(0, 8, size=2))
            y0, y1 = sorted(int(v) for v in rng.integers(0, 8, size=2))
            return f"in({rng.choice(names)}, {x0}, {y0}, {x1}, {y1})"
        a, b = rng.choice(names), rng.choice(names)
        return f"{kind}({a}, {b})"
    op = rng.random()
    if op < 0.2:
        return f"not ({_gen_expr(rng, names, depth - 1)})"
    joiner = "and" if op < 0.6 else "or"
    return (f"({_gen_expr(rng, names, depth - 1)}) {joiner} "
            f"({_gen_expr(rng, names, depth - 1)})")


def _gen_program(rng, schema):
    n_sym = int(rng.integers(1, 4))
    lines = []
    names = []
    for i in range(n_sym):
        name = string.ascii_lowercase[i]
        group = rng.choice(schema.groups)
        r = rng.random()
        index = "any" if r < 0.6 else ("all" if r < 0.8 else
                                       str(int(rng.integers(0, 4))))
        lines.append(f"symbol {name}: {group}[{index}]")
        names.append(name)
    for _ in range(int(rng.integers(1, 3))):
        trigger = _gen_expr(rng, names, int(rng.integers(1, 3)))
        n_recv = int(rng.integers(1, len(names) + 1))
        recv = list(rng.choice(names, size=n_recv, replace=False))
        vals = [f"{float(v):g}" for v in rng.integers(-3, 4, size=n_recv)]
        lines.append(f"rule on {trigger} receiver {', '.join(recv)} "
                     f"value {', '.join(vals)}")
    return "\n".join(lines)


def _gen_world_state(rng, schema):
    next_id = 0
    members = {}
    for g in schema.groups:
        n = int(rng.integers(0, 5))
        members[g] = tuple(range(next_id, next_id + n))
        next_id += n
    all_ids = [i for ids in members.values() for i in ids]
    pos = {i: (int(rng.integers(0, 8)), int(rng.integers(0, 8)))
           for i in all_ids}
    log = FakeLog()
    if all_ids:
        for _ in range(int(rng.integers(0, 6))):
            a, t = rng.choice(all_ids), rng.choice(all_ids)
            if a != t:
                log.attacks.append((int(a), int(t)))
        for a, t in log.attacks:
            if rng.random() < 0.3:
                log.kills.append((a, t))
                log.dies.append(t)
        for _ in range(int(rng.integers(0, 4))):
            a, b = rng.choice(all_ids), rng.choice(all_ids)
            log.collides.append((int(a), int(b) if rng.random() < 0.8 else -1))
    log.dies = sorted(set(log.dies))
    return snap(members, pos), log


class TestOracleEquivalenceFuzz:
    N_CASES = 1000

    def test_fuzzed_equivalence(self):
        rng = np.random.default_rng(2024)
        schema = GroupSchema(groups=("red", "blue", "food"), width=8, height=8)
        checked = 0
        attempts = 0
        while checked < self.N_CASES:
            attempts += 1
            assert attempts < self.N_CASES * 30, "generator rejects too much"
            text = _gen_program(rng, schema)
            program = parse_program(text)
            try:
                validate(program, schema)
            except DslValidationError:
                continue
            snapshot, log = _gen_world_state(rng, schema)
            fast = evaluate(program, log, snapshot)
            slow = brute_force_evaluate(program, log, snapshot)
            assert fast == slow, (
                f"case {checked} diverged\nprogram:\n{text}\n"
                f"members={snapshot.members}\npos={snapshot.pos}\n"
                f"log={log}\nfast={fast}\nslow={slow}"
            )
            checked += 1

    def test_round_tripped_programs_agree(self):
        rng = np.random.default_rng(55)
        schema = GroupSchema(groups=("red", "blue"), width=8, height=8)
        done = 0
        while done < 50:
            text = _gen_program(rng, schema)
            program = parse_program(text)
            try:
                validate(program, schema)
            except DslValidationError:
                continue
            snapshot, log = _gen_world_state(rng, schema)
            again = parse_program(pretty_print(program))
            assert evaluate(program, log, snapshot) == \
                evaluate(again, log, snapshot)
            done += 1
