import pytest

from dagmdp.attack import (
    CONTINUE,
    Action,
    ActionKind,
    AttackState,
    ModelParams,
    Weight,
    _cls,
    _mine,
    feasible_actions,
    outcomes,
    settle,
    start_states,
    symbolic_start_states,
    transitions,
)
from dagmdp.blockdag import BlockDag, Miner, WithholdStatus
from dagmdp.bitcoin import Bitcoin
from dagmdp.canonical import dag_from_key
from dagmdp.errors import ConfigError, InvariantError
from dagmdp.ethereum import Ethereum

RELEASED_ROOT = bytes([1, 26, 0])  # (preferred, preferred, released)
FOREIGN_ROOT = bytes([1, 24, 0])  # (preferred, preferred, foreign)


def key_of(dag: BlockDag) -> bytes:
    return AttackState.from_dag(dag).key


def test_params_validation():
    with pytest.raises(ConfigError):
        ModelParams(alpha=-0.1, gamma=0.5, limit=3)
    with pytest.raises(ConfigError):
        ModelParams(alpha=0.3, gamma=1.5, limit=3)
    with pytest.raises(ConfigError):
        ModelParams(alpha=0.3, gamma=0.5, limit=0)


def test_boundary_classes():
    assert [_cls(x) for x in (0.0, 0.3, 1.0)] == [0, 1, 2]


def test_start_states():
    sym = symbolic_start_states(1)
    assert [(w, s.key) for w, s in sym] == [
        (Weight(1.0, ea=1), RELEASED_ROOT),
        (Weight(1.0, eb=1), FOREIGN_ROOT),
    ]
    assert [s.key for _, s in symbolic_start_states(0)] == [FOREIGN_ROOT]
    assert [s.key for _, s in symbolic_start_states(2)] == [RELEASED_ROOT]
    numeric = start_states(ModelParams(alpha=0.3, gamma=0.5, limit=3))
    assert [(p, s.key) for p, s in numeric] == [
        (0.3, RELEASED_ROOT),
        (0.7, FOREIGN_ROOT),
    ]


def test_action_names():
    assert str(Action(ActionKind.RELEASE, 2)) == "Release(2)"
    assert str(Action(ActionKind.CONSIDER, 1)) == "Consider(1)"
    assert str(CONTINUE) == "Continue"


def test_feasible_actions_on_race(race_dag):
    s = AttackState.from_dag(race_dag)
    assert feasible_actions(s) == [
        Action(ActionKind.RELEASE, 1),
        Action(ActionKind.CONSIDER, 1),
        CONTINUE,
    ]


def test_infeasible_action_rejected(race_dag):
    s = AttackState.from_dag(race_dag)
    with pytest.raises(InvariantError, match="no release candidate"):
        outcomes(s, Action(ActionKind.RELEASE, 2), Bitcoin(), limit=4)
    with pytest.raises(InvariantError, match="no consider candidate"):
        outcomes(s, Action(ActionKind.CONSIDER, 9), Bitcoin(), limit=4)


def test_continue_weight_monomials():
    _, s = symbolic_start_states(1)[1]  # foreign genesis
    outs = outcomes(s, CONTINUE, Bitcoin(), limit=3)
    assert [o.weight for o in outs] == [
        Weight(1.0, ea=1, ec=1),
        Weight(1.0, eb=1, ec=1),
        Weight(1.0, ea=1, ed=1),
        Weight(1.0, eb=1, ed=1),
    ]
    assert all(o.progress == 0.0 for o in outs)
    # boundary classes drop branches structurally
    slow_only = outcomes(s, CONTINUE, Bitcoin(), limit=3, aclass=1, gclass=0)
    assert [o.weight for o in slow_only] == [
        Weight(1.0, ea=1, ed=1),
        Weight(1.0, eb=1, ed=1),
    ]
    att_only = outcomes(s, CONTINUE, Bitcoin(), limit=3, aclass=2, gclass=1)
    assert [o.weight for o in att_only] == [
        Weight(1.0, ea=1, ec=1),
        Weight(1.0, ea=1, ed=1),
    ]


def test_continue_from_start_mines_one_block():
    _, s = symbolic_start_states(1)[1]
    ts = transitions(s, CONTINUE, ModelParams(0.25, 0.5, 3), Bitcoin())

    withheld_child = BlockDag(WithholdStatus.FOREIGN)
    withheld_child.append_block((0,), WithholdStatus.WITHHELD)
    foreign_child = BlockDag(WithholdStatus.FOREIGN)
    foreign_child.append_block((0,), WithholdStatus.FOREIGN)

    assert [(t.probability, t.successor) for t in ts] == [
        (0.25, key_of(withheld_child)),
        (0.75, key_of(foreign_child)),
    ]
    assert all(t.reward_attacker == t.reward_defender == t.progress == 0.0 for t in ts)


def adopt_scenario() -> AttackState:
    """Defender one ahead; the attacker has nothing withheld."""
    d = BlockDag(WithholdStatus.FOREIGN)
    db = d.append_block((0,), WithholdStatus.FOREIGN)
    d.mark_known(db)
    d.set_preferred_by_defender(db)
    d.check_invariants()
    return AttackState.from_dag(d)


def test_consider_adopts_and_settles():
    s = adopt_scenario()
    assert feasible_actions(s) == [Action(ActionKind.CONSIDER, 1), CONTINUE]
    ts = transitions(s, Action(ActionKind.CONSIDER, 1), ModelParams(0.3, 0.5, 3), Bitcoin())
    # adopting the defender block moves the common ancestor one step: the old
    # genesis (defender-mined) is charged and the DAG shrinks back to one block
    assert ts == [
        type(ts[0])(
            probability=1.0,
            successor=FOREIGN_ROOT,
            reward_attacker=0.0,
            reward_defender=1.0,
            progress=1.0,
        )
    ]


def override_scenario() -> AttackState:
    """Attacker privately two ahead of a defender block at height one."""
    d = BlockDag(WithholdStatus.FOREIGN)
    a1 = d.append_block((0,), WithholdStatus.WITHHELD)
    a2 = d.append_block((a1,), WithholdStatus.WITHHELD)
    d.mark_considered(a1)
    d.mark_considered(a2)
    d.set_preferred_by_attacker(a2)
    db = d.append_block((0,), WithholdStatus.FOREIGN)
    d.mark_known(db)
    d.set_preferred_by_defender(db)
    d.check_invariants()
    return AttackState.from_dag(d)


def test_release_then_continue_overrides():
    s = override_scenario()
    assert Action(ActionKind.RELEASE, 1) in feasible_actions(s)

    (o,) = outcomes(s, Action(ActionKind.RELEASE, 1), Bitcoin(), limit=3)
    assert o.weight == Weight(1.0)
    assert (o.reward_attacker, o.reward_defender, o.progress) == (0.0, 0.0, 0.0)
    (o2,) = outcomes(o.successor, Action(ActionKind.RELEASE, 1), Bitcoin(), limit=3)

    ts = transitions(o2.successor, CONTINUE, ModelParams(0.3, 0.5, 3), Bitcoin())
    # both delivery orders converge (the defender block is already known), so
    # fast and slow branches merge and only the miner of the next block forks
    root = BlockDag(WithholdStatus.RELEASED)
    att = root.clone()
    att.append_block((0,), WithholdStatus.WITHHELD)
    deff = root.clone()
    deff.append_block((0,), WithholdStatus.FOREIGN)
    assert [(t.probability, t.successor) for t in ts] == [
        (0.3, key_of(att)),
        (0.7, key_of(deff)),
    ]
    # the settled span is genesis (defender's) plus the first withheld block
    assert all(t.reward_attacker == 1.0 for t in ts)
    assert all(t.reward_defender == 1.0 for t in ts)
    assert all(t.progress == 2.0 for t in ts)


def match_scenario() -> AttackState:
    """Released attacker block races an undelivered defender block."""
    d = BlockDag(WithholdStatus.FOREIGN)
    a1 = d.append_block((0,), WithholdStatus.WITHHELD)
    d.mark_released(a1)
    d.mark_considered(a1)
    d.set_preferred_by_attacker(a1)
    d.append_block((0,), WithholdStatus.FOREIGN)
    d.check_invariants()
    return AttackState.from_dag(d)


def test_match_race_depends_on_delivery_order():
    s = match_scenario()
    # cap at 1 suppresses mining so the race outcome is isolated
    ts = transitions(s, CONTINUE, ModelParams(0.3, 0.8, 1), Bitcoin())
    assert len(ts) == 2
    fast, slow = ts
    # fast: the attacker block arrives first, wins the tie, and the defender
    # switching over lets the race settle in the attacker's favor
    assert fast.probability == pytest.approx(0.8)
    assert fast.successor == RELEASED_ROOT
    assert (fast.reward_attacker, fast.reward_defender) == (0.0, 1.0)
    assert fast.progress == 1.0
    # slow: the defender keeps its own block while the attacker still prefers
    # the released one, so nothing is common yet and the standoff persists
    assert slow.probability == pytest.approx(0.2)
    assert (slow.reward_attacker, slow.reward_defender) == (0.0, 0.0)
    assert slow.progress == 0.0
    standoff = dag_from_key(slow.successor)
    assert len(standoff) == 3
    assert standoff.preferred_by_attacker() != standoff.preferred_by_defender()


class SplitTies(Bitcoin):
    """Bitcoin variant whose preference forks on height ties."""

    name = "split-ties"

    def update(self, v, current, incoming):
        ch, ci = v.height(current), v.height(incoming)
        if ch == ci:
            return (current, incoming)
        return incoming if ci > ch else current


def test_multivalued_update_forks_uniformly():
    s = match_scenario()
    outs = outcomes(s, CONTINUE, SplitTies(), limit=1)
    # each side of the race forks once on the height tie, and every delivery
    # outcome still branches on the miner: eight half-weight outcomes
    weights = sorted((o.weight.coef, o.weight.ea, o.weight.eb, o.weight.ec, o.weight.ed) for o in outs)
    assert weights == sorted(
        [
            (0.5, 1, 0, 1, 0),
            (0.5, 0, 1, 1, 0),
            (0.5, 1, 0, 0, 1),
            (0.5, 0, 1, 0, 1),
        ]
        * 2
    )
    assert sum(o.weight.value(0.3, 0.8) for o in outs) == pytest.approx(1.0, abs=1e-12)


def test_mining_slot_rule_and_cap():
    d = BlockDag(WithholdStatus.FOREIGN)
    assert _mine(d.clone(), Bitcoin(), attacker=True, limit=3) is not None

    taken = d.clone()
    taken.append_block((0,), WithholdStatus.WITHHELD)
    # same (parents, miner) slot already exists: no second block
    assert _mine(taken, Bitcoin(), attacker=True, limit=3) is None
    # the defender's slot on the same parents is still free
    got = _mine(taken, Bitcoin(), attacker=False, limit=3)
    assert got is not None and got[2] == Miner.DEFENDER

    capped = BlockDag(WithholdStatus.FOREIGN)
    capped.append_block((0,), WithholdStatus.FOREIGN)
    assert _mine(capped, Bitcoin(), attacker=True, limit=1) is None


def test_ethereum_settlement_walks_below_dangling_uncles():
    p = Ethereum()
    d = BlockDag(WithholdStatus.FOREIGN)
    b1 = d.append_block((0,), WithholdStatus.FOREIGN)
    f = d.append_block((b1,), WithholdStatus.FOREIGN)
    b2 = d.append_block((b1,), WithholdStatus.FOREIGN)
    b3 = d.append_block((b2, f), WithholdStatus.FOREIGN)  # uncle ref to f
    for b in (b1, f, b2, b3):
        d.mark_known(b)
        d.mark_considered(b)
    d.set_preferred_by_defender(b3)
    d.set_preferred_by_attacker(b2)
    d.check_invariants()

    # preference ancestor is b2, but b3 would keep a dangling reference to f,
    # so settlement backs off to b1 and only charges genesis
    ra, rd, progress = settle(d, p)
    assert (ra, rd, progress) == (0.0, 1.0, 1.0)
    assert len(d) == 4  # b1 (new root), f, b2, b3 all survive
    d.check_invariants()


def test_trace_hooks_are_consistent():
    s = override_scenario()
    outs = outcomes(s, CONTINUE, Bitcoin(), limit=3, trace=True)
    for o in outs:
        n = len(o.successor.dag)
        assert o.idmap is not None
        assert sorted(set(o.idmap.values())) == sorted(o.idmap.values())  # injective
        assert all(0 <= v < n for v in o.idmap.values())
        if o.appended is not None:
            new_id, parents, miner = o.appended
            assert isinstance(parents, tuple)
            assert miner in (Miner.ATTACKER, Miner.DEFENDER)


def test_transition_probabilities_sum_to_one_across_state_space():
    from dagmdp.explore import explore

    params = ModelParams(alpha=0.3, gamma=0.6, limit=2)
    m = explore(Bitcoin(), params)
    assert sum(p for _, p in m.start) == pytest.approx(1.0, abs=1e-12)
    for key in m.states:
        s = AttackState(key, dag_from_key(key))
        for action in feasible_actions(s):
            ts = transitions(s, action, params, Bitcoin())
            assert sum(t.probability for t in ts) == pytest.approx(1.0, abs=1e-12)
            assert all(t.probability > 0.0 for t in ts)
