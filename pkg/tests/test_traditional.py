import pytest

from dagmdp.attack import ModelParams, Weight
from dagmdp.errors import InvariantError
from dagmdp.traditional import (
    ADOPT,
    MATCH,
    OVERRIDE,
    WAIT,
    ChainState,
    Fork,
    TraditionalModel,
    explore_traditional,
    honest_chain_action,
)


def st(a: int, b: int, fork: Fork = Fork.IRRELEVANT) -> ChainState:
    return ChainState(a, b, fork)


def test_key_round_trip():
    s = st(3, 1, Fork.ACTIVE)
    assert ChainState.from_key(s.key) == s
    assert str(s) == "(a=3, b=1, active)"
    with pytest.raises(InvariantError):
        ChainState.from_key(b"\x00\x01")


def test_action_feasibility():
    m = TraditionalModel(limit=7)
    assert m.actions(st(0, 0)) == [WAIT]
    assert m.actions(st(1, 1)) == [ADOPT, WAIT]
    assert m.actions(st(1, 1, Fork.RELEVANT)) == [ADOPT, MATCH, WAIT]
    assert m.actions(st(2, 1, Fork.RELEVANT)) == [ADOPT, MATCH, OVERRIDE, WAIT]
    assert m.actions(st(1, 2, Fork.RELEVANT)) == [ADOPT, WAIT]
    # Match needs headroom to keep racing
    assert m.actions(st(7, 1, Fork.RELEVANT)) == [ADOPT, OVERRIDE, WAIT]


def outs(m, s, action):
    return [
        (o.weight, o.successor, o.reward_attacker, o.reward_defender, o.progress)
        for o in m.expand(s, action)
    ]


def test_adopt_and_override_are_deterministic():
    m = TraditionalModel(limit=7)
    assert outs(m, st(2, 3, Fork.RELEVANT), ADOPT) == [
        (Weight(1.0), st(0, 0), 0.0, 3.0, 3.0)
    ]
    assert outs(m, st(3, 1, Fork.RELEVANT), OVERRIDE) == [
        (Weight(1.0), st(1, 0), 2.0, 0.0, 2.0)
    ]


def test_match_race_branches():
    m = TraditionalModel(limit=7)
    assert outs(m, st(2, 2, Fork.RELEVANT), MATCH) == [
        (Weight(1.0, ea=1), st(3, 2, Fork.ACTIVE), 0.0, 0.0, 0.0),
        (Weight(1.0, eb=1, ec=1), st(0, 1, Fork.RELEVANT), 2.0, 0.0, 2.0),
        (Weight(1.0, eb=1, ed=1), st(2, 3, Fork.RELEVANT), 0.0, 0.0, 0.0),
    ]
    # waiting inside an undecided race keeps the same branch structure
    assert outs(m, st(3, 2, Fork.ACTIVE), WAIT) == [
        (Weight(1.0, ea=1), st(4, 2, Fork.ACTIVE), 0.0, 0.0, 0.0),
        (Weight(1.0, eb=1, ec=1), st(1, 1, Fork.RELEVANT), 2.0, 0.0, 2.0),
        (Weight(1.0, eb=1, ed=1), st(3, 3, Fork.RELEVANT), 0.0, 0.0, 0.0),
    ]


def test_wait_outside_race_just_mines():
    m = TraditionalModel(limit=7)
    assert outs(m, st(1, 0), WAIT) == [
        (Weight(1.0, ea=1), st(2, 0), 0.0, 0.0, 0.0),
        (Weight(1.0, eb=1), st(1, 1, Fork.RELEVANT), 0.0, 0.0, 0.0),
    ]


def test_cap_suppression_self_loops():
    m = TraditionalModel(limit=3)
    assert outs(m, st(3, 0), WAIT)[0] == (Weight(1.0, ea=1), st(3, 0), 0.0, 0.0, 0.0)
    assert outs(m, st(0, 3), WAIT)[1] == (Weight(1.0, eb=1), st(0, 3), 0.0, 0.0, 0.0)
    race = outs(m, st(3, 3, Fork.ACTIVE), WAIT)
    assert race[0][1] == st(3, 3, Fork.ACTIVE)  # attacker branch pinned
    assert race[2][1] == st(3, 3, Fork.ACTIVE)  # slow branch pinned, race stays on


def test_boundary_classes_drop_branches():
    m = TraditionalModel(limit=3, aclass=2)
    assert [o.weight for o in m.expand(st(1, 1, Fork.RELEVANT), MATCH)] == [
        Weight(1.0, ea=1)
    ]
    m = TraditionalModel(limit=3, aclass=1, gclass=0)
    ws = [o.weight for o in m.expand(st(1, 1, Fork.RELEVANT), MATCH)]
    assert ws == [Weight(1.0, ea=1), Weight(1.0, eb=1, ed=1)]


def test_honest_behavior():
    assert honest_chain_action(st(0, 1)) == ADOPT
    assert honest_chain_action(st(2, 1)) == OVERRIDE
    assert honest_chain_action(st(1, 1)) == WAIT


def test_explored_space():
    m = explore_traditional(ModelParams(alpha=0.3, gamma=0.5, limit=7))
    assert m.n_states == 134
    assert m.start == [(0, 1.0)]
    assert m.states[0] == ChainState(0, 0, Fork.IRRELEVANT).key
    for i in range(m.n_states):
        for row in m.transitions[i]:
            assert sum(t.probability for t in row) == pytest.approx(1.0, abs=1e-12)

    # boundary instantiation prunes zero-probability branches structurally
    m0 = explore_traditional(ModelParams(alpha=0.3, gamma=0.0, limit=7))
    n_branches = lambda mdp: sum(len(row) for rows in mdp.transitions for row in rows)
    assert n_branches(m0) < n_branches(m)
    assert all(
        t.probability > 0.0 for rows in m0.transitions for row in rows for t in row
    )
