"""Reward-rule evaluation against a step's event log.

Semantics: per rule, every distinct binding of its ``any`` symbols to agents
of their groups that makes the trigger true fires once, adding each value to
its receiver.  ``k``-indexed symbols bind to the k-th group member at step
start (rule skipped if infeasible); ``all`` symbols quantify universally and
as receivers denote the whole group.  ``in`` is position-derived at step end
(death position for agents that died this step).

``evaluate`` enumerates candidates from the event log via a DNF join;
``brute_force_evaluate`` is the independent oracle doing full cross-product
enumeration with its own truth function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .dsl import ALL, ANY, And, EventAtom, Not, Or, Program, RewardRule
from .errors import OracleTooLargeError

ORACLE_GUARD = 10**6


@dataclass
class RewardSnapshot:
    """Pre-step group membership plus end-of-step positions.

    members: group name -> tuple of ids alive at step start, ascending.
    pos: id -> (x, y) anchor at step end (agents that died this step keep
    their position at death).
    """

    members: dict
    pos: dict


def make_snapshot(world, group_names) -> RewardSnapshot:
    """Capture membership before a step; positions read lazily post-step.

    Call before stepping, then ``finish()`` after the step (dead agents'
    rows keep their last position, so one world read suffices).
    """
    members = {
        name: tuple(int(i) for i in world.group_members(g))
        for g, name in enumerate(group_names)
    }
    snap = RewardSnapshot(members=members, pos={})
    return snap


def finish_snapshot(snap: RewardSnapshot, world) -> RewardSnapshot:
    for ids in snap.members.values():
        for i in ids:
            snap.pos[i] = (int(world.a_x[i]), int(world.a_y[i]))
    return snap


def _event_sets(event_log):
    return {
        "attack": set(event_log.attacks),
        "kill": set(event_log.kills),
        "die": {(d,) for d in event_log.dies},
        "collide": {(a, b) for a, b in event_log.collides if b >= 0},
    }


# -- shared truth machinery for the indexed evaluator ------------------------

def _atom_true(atom: EventAtom, binding, events, snap) -> bool:
    if atom.kind == "in":
        x0, y0, x1, y1 = atom.rect
        x, y = snap.pos[binding[atom.args[0]]]
        return x0 <= x <= x1 and y0 <= y <= y1
    return tuple(binding[a] for a in atom.args) in events[atom.kind]


def _expr_true(expr, binding, events, snap) -> bool:
    if isinstance(expr, EventAtom):
        return _atom_true(expr, binding, events, snap)
    if isinstance(expr, Not):
        return not _expr_true(expr.expr, binding, events, snap)
    if isinstance(expr, And):
        return _expr_true(expr.left, binding, events, snap) and _expr_true(
            expr.right, binding, events, snap
        )
    if isinstance(expr, Or):
        return _expr_true(expr.left, binding, events, snap) or _expr_true(
            expr.right, binding, events, snap
        )
    raise TypeError(f"not an expression: {expr!r}")


def _holds(trigger, binding, all_syms, snap, events) -> bool:
    """Trigger truth with universal quantification over the ``all`` symbols."""
    pools = [snap.members[s.group] for s in all_syms]
    for combo in itertools.product(*pools):
        full = dict(binding)
        for s, agent in zip(all_syms, combo):
            full[s.name] = agent
        if not _expr_true(trigger, full, events, snap):
            return False
    return True


# -- DNF candidate generation ------------------------------------------------

def _nnf(expr, neg=False):
    if isinstance(expr, Not):
        return _nnf(expr.expr, not neg)
    if isinstance(expr, And):
        node = Or if neg else And
        return node(_nnf(expr.left, neg), _nnf(expr.right, neg))
    if isinstance(expr, Or):
        node = And if neg else Or
        return node(_nnf(expr.left, neg), _nnf(expr.right, neg))
    return Not(expr) if neg else expr


def _dnf_clauses(expr):
    """NNF expression -> list of clauses, each a list of (atom, negated)."""
    if isinstance(expr, Or):
        return _dnf_clauses(expr.left) + _dnf_clauses(expr.right)
    if isinstance(expr, And):
        left = _dnf_clauses(expr.left)
        right = _dnf_clauses(expr.right)
        return [lc + rc for lc in left for rc in right]
    if isinstance(expr, Not):
        return [[(expr.expr, True)]]
    return [[(expr, False)]]


def _join_literal(bindings, atom, symtab, events, snap):
    """Extend partial bindings with matches of one positive literal."""
    if atom.kind == "in":
        name = atom.args[0]
        sym = symtab[name]
        if sym.index != ANY:
            return bindings  # constraint only; checked by the truth pass
        x0, y0, x1, y1 = atom.rect
        cands = [
            i for i in snap.members[sym.group]
            if x0 <= snap.pos[i][0] <= x1 and y0 <= snap.pos[i][1] <= y1
        ]
        result = set()
        for b in bindings:
            if name in b:
                if b[name] in cands:
                    result.add(tuple(sorted(b.items())))
            else:
                for c in cands:
                    nb = dict(b)
                    nb[name] = c
                    result.add(tuple(sorted(nb.items())))
        return [dict(t) for t in result]
    matches = events[atom.kind]
    result = set()
    for b in bindings:
        for ev in matches:
            nb = dict(b)
            ok = True
            for name, agent in zip(atom.args, ev):
                sym = symtab[name]
                if sym.index != ANY:
                    continue  # all / concrete symbols are not joined here
                if agent not in snap.members[sym.group]:
                    ok = False
                    break
                if name in nb:
                    if nb[name] != agent:
                        ok = False
                        break
                else:
                    nb[name] = agent
            if ok:
                result.add(tuple(sorted(nb.items())))
    return [dict(t) for t in result]


def _rule_bindings(rule: RewardRule, program: Program, events, snap):
    """Candidate any-symbol bindings for one rule (superset of satisfying)."""
    symtab = {s.name: s for s in program.symbols}
    used = set(rule.receivers)
    from .dsl import referenced_symbols

    used |= referenced_symbols(rule.trigger)
    any_syms = sorted(n for n in used if symtab[n].index == ANY)

    # concrete symbols fixed up front; infeasible index skips the rule
    base = {}
    for n in sorted(used):
        s = symtab[n]
        if isinstance(s.index, int):
            members = snap.members[s.group]
            if s.index >= len(members):
                return None, None
            base[n] = members[s.index]

    # an empty universally-quantified group makes the trigger vacuously
    # true, so every binding of the free symbols fires
    if any(
        symtab[n].index == ALL and not snap.members[symtab[n].group]
        for n in used
    ):
        pools = [snap.members[symtab[n].group] for n in any_syms]
        candidates = set()
        for combo in itertools.product(*pools):
            full = dict(base)
            full.update(zip(any_syms, combo))
            candidates.add(
                tuple(sorted((n, full[n]) for n in any_syms + list(base)))
            )
        return candidates, symtab

    clauses = _dnf_clauses(_nnf(rule.trigger))
    candidates = set()
    for clause in clauses:
        bindings = [dict(base)]
        for atom, negated in clause:
            if negated:
                continue
            bindings = _join_literal(bindings, atom, symtab, events, snap)
            if not bindings:
                break
        for b in bindings:
            free = [n for n in any_syms if n not in b]
            pools = [snap.members[symtab[n].group] for n in free]
            for combo in itertools.product(*pools):
                full = dict(b)
                full.update(zip(free, combo))
                candidates.add(tuple(sorted((n, full[n]) for n in any_syms + list(base))))
    return candidates, symtab


def _payout(rewards, rule, binding, symtab, snap):
    for name, value in zip(rule.receivers, rule.values):
        sym = symtab[name]
        if sym.index == ALL:
            for m in snap.members[sym.group]:
                rewards[m] = rewards.get(m, 0.0) + value
        else:
            agent = binding[name]
            rewards[agent] = rewards.get(agent, 0.0) + value


def evaluate(program: Program, event_log, snapshot: RewardSnapshot) -> dict:
    """Indexed evaluation; returns agent id -> reward delta (only nonzero
    recipients and agents touched by a firing rule appear)."""
    events = _event_sets(event_log)
    symtab = {s.name: s for s in program.symbols}
    rewards: dict = {}
    for rule in program.rules:
        candidates, _ = _rule_bindings(rule, program, events, snapshot)
        if candidates is None:
            continue
        all_syms = [
            symtab[n]
            for n in sorted(symtab)
            if symtab[n].index == ALL and _rule_uses(rule, n)
        ]
        for cand in candidates:
            binding = dict(cand)
            if _holds(rule.trigger, binding, all_syms, snapshot, events):
                _payout(rewards, rule, binding, symtab, snapshot)
    return rewards


def _rule_uses(rule: RewardRule, name: str) -> bool:
    from .dsl import referenced_symbols

    return name in rule.receivers or name in referenced_symbols(rule.trigger)


# -- independent brute-force oracle ------------------------------------------

def _bf_expr(expr, binding, log_attacks, log_kills, log_dies, log_collides, pos):
    if isinstance(expr, EventAtom):
        if expr.kind == "attack":
            return (binding[expr.args[0]], binding[expr.args[1]]) in log_attacks
        if expr.kind == "kill":
            return (binding[expr.args[0]], binding[expr.args[1]]) in log_kills
        if expr.kind == "collide":
            return (binding[expr.args[0]], binding[expr.args[1]]) in log_collides
        if expr.kind == "die":
            return binding[expr.args[0]] in log_dies
        x0, y0, x1, y1 = expr.rect
        x, y = pos[binding[expr.args[0]]]
        return x0 <= x <= x1 and y0 <= y <= y1
    if isinstance(expr, Not):
        return not _bf_expr(expr.expr, binding, log_attacks, log_kills,
                            log_dies, log_collides, pos)
    if isinstance(expr, And):
        return _bf_expr(expr.left, binding, log_attacks, log_kills, log_dies,
                        log_collides, pos) and \
               _bf_expr(expr.right, binding, log_attacks, log_kills, log_dies,
                        log_collides, pos)
    if isinstance(expr, Or):
        return _bf_expr(expr.left, binding, log_attacks, log_kills, log_dies,
                        log_collides, pos) or \
               _bf_expr(expr.right, binding, log_attacks, log_kills, log_dies,
                        log_collides, pos)
    raise TypeError(f"not an expression: {expr!r}")


def brute_force_evaluate(program: Program, event_log, snapshot) -> dict:
    """Exhaustive cross-product evaluation; identical contract to evaluate."""
    attacks = set(event_log.attacks)
    kills = set(event_log.kills)
    dies = set(event_log.dies)
    collides = {(a, b) for a, b in event_log.collides if b >= 0}
    symtab = {s.name: s for s in program.symbols}
    rewards: dict = {}

    for rule in program.rules:
        used = set(rule.receivers)
        from .dsl import referenced_symbols

        used |= referenced_symbols(rule.trigger)
        any_names = sorted(n for n in used if symtab[n].index == ANY)
        all_names = sorted(n for n in used if symtab[n].index == ALL)

        base = {}
        feasible = True
        for n in sorted(used):
            s = symtab[n]
            if isinstance(s.index, int):
                members = snapshot.members[s.group]
                if s.index >= len(members):
                    feasible = False
                    break
                base[n] = members[s.index]
        if not feasible:
            continue

        count = 1
        for n in any_names + all_names:
            count *= max(1, len(snapshot.members[symtab[n].group]))
        if count > ORACLE_GUARD:
            raise OracleTooLargeError(
                f"binding count {count} exceeds oracle guard {ORACLE_GUARD}"
            )

        any_pools = [snapshot.members[symtab[n].group] for n in any_names]
        all_pools = [snapshot.members[symtab[n].group] for n in all_names]
        for combo in itertools.product(*any_pools):
            binding = dict(base)
            binding.update(zip(any_names, combo))
            fires = True
            for acombo in itertools.product(*all_pools):
                full = dict(binding)
                full.update(zip(all_names, acombo))
                if not _bf_expr(rule.trigger, full, attacks, kills, dies,
                                collides, snapshot.pos):
                    fires = False
                    break
            if fires:
                for name, value in zip(rule.receivers, rule.values):
                    s = symtab[name]
                    if s.index == ALL:
                        for m in snapshot.members[s.group]:
                            rewards[m] = rewards.get(m, 0.0) + value
                    else:
                        agent = binding[name]
                        rewards[agent] = rewards.get(agent, 0.0) + value
    return rewards
