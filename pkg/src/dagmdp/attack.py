"""Generic selfish-mining decision process over labeled BlockDAGs.

States are truncated, canonically keyed BlockDAGs.  The attacker chooses
between releasing a withheld block, taking an ignored block into account, or
letting time pass (Continue).  Continue races communication (fast with
probability gamma) against mining (attacker with probability alpha), after
which the common history is settled: rewards are charged for the blocks that
leave the DAG and the DAG is truncated to the new common ancestor.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .blockdag import (
    BlockDag,
    BlockId,
    DefenderView,
    IgnoreStatus,
    Miner,
    WithholdStatus,
    latest_common_ancestor,
)
from .canonical import raw_key, rebuild
from .errors import ConfigError, InvariantError
from .protocol import DagView, ProtocolSpec


@dataclass(frozen=True)
class ModelParams:
    """Attacker mining share, communication advantage, DAG height cap."""

    alpha: float
    gamma: float
    limit: int

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.limit < 1:
            raise ConfigError(f"limit must be at least 1, got {self.limit}")


class ActionKind(IntEnum):
    RELEASE = 0
    CONSIDER = 1
    CONTINUE = 2


@dataclass(frozen=True, order=True)
class Action:
    """Release(i) / Consider(i) address the i-th candidate (1-based)."""

    kind: ActionKind
    index: int = 0

    def __str__(self) -> str:
        if self.kind == ActionKind.RELEASE:
            return f"Release({self.index})"
        if self.kind == ActionKind.CONSIDER:
            return f"Consider({self.index})"
        return "Continue"


CONTINUE = Action(ActionKind.CONTINUE)


@dataclass(frozen=True, slots=True)
class Transition:
    """One probabilistic outcome of an action.

    ``successor`` is a state key (bytes) at the attack-model level and a
    dense state index inside an explored MDP.
    """

    probability: float
    successor: object
    reward_attacker: float
    reward_defender: float
    progress: float


@dataclass(frozen=True, slots=True)
class Weight:
    """Probability monomial coef * a^ea * (1-a)^eb * g^ec * (1-g)^ed."""

    coef: float
    ea: int = 0
    eb: int = 0
    ec: int = 0
    ed: int = 0

    def value(self, alpha: float, gamma: float) -> float:
        return (
            self.coef
            * alpha**self.ea
            * (1.0 - alpha) ** self.eb
            * gamma**self.ec
            * (1.0 - gamma) ** self.ed
        )


def _cls(x: float) -> int:
    """0, 1, 2 for boundary-zero, interior, boundary-one."""
    return 0 if x == 0.0 else 2 if x == 1.0 else 1


class AttackState:
    """A canonically keyed model state; ``dag`` is the canonical representative."""

    __slots__ = ("key", "dag")

    def __init__(self, key: bytes, dag: BlockDag):
        self.key = key
        self.dag = dag

    @classmethod
    def from_dag(cls, dag: BlockDag) -> "AttackState":
        key, rep, _ = rebuild(dag)
        return cls(key, rep)

    def __eq__(self, other) -> bool:
        return isinstance(other, AttackState) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<AttackState {self.key.hex()}>"


@dataclass(slots=True)
class Outcome:
    """Internal, pre-merge transition with symbolic weight."""

    weight: Weight
    successor: "AttackState"
    reward_attacker: float
    reward_defender: float
    progress: float
    idmap: dict[BlockId, BlockId] | None = None
    appended: tuple | None = None


def attacker_view(dag: BlockDag) -> DagView:
    """What the attacker acts on: ignored blocks are hidden."""
    return DagView(dag, [dag.ignore(b) != IgnoreStatus.IGNORED for b in dag.blocks()])


def defender_view(dag: BlockDag) -> DagView:
    """What the defender acts on: unknown blocks are hidden."""
    return DagView(dag, [dag.view(b) != DefenderView.UNKNOWN for b in dag.blocks()])


def start_states(params: ModelParams) -> list[tuple[float, AttackState]]:
    """The one-block DAGs: genesis attacker-mined with probability alpha."""
    return [
        (w.value(params.alpha, params.gamma), s)
        for w, s in symbolic_start_states(_cls(params.alpha))
    ]


def symbolic_start_states(
    aclass: int, canonical: bool = True
) -> list[tuple[Weight, AttackState]]:
    def pack(dag: BlockDag) -> AttackState:
        if canonical:
            return AttackState.from_dag(dag)
        return AttackState(raw_key(dag), dag)

    out = []
    if aclass != 0:
        out.append((Weight(1.0, ea=1), pack(BlockDag(WithholdStatus.RELEASED))))
    if aclass != 2:
        out.append((Weight(1.0, eb=1), pack(BlockDag(WithholdStatus.FOREIGN))))
    return out


def feasible_actions(state: AttackState) -> list[Action]:
    """Release(1..r), Consider(1..c), then Continue (always feasible)."""
    acts = [Action(ActionKind.RELEASE, i + 1) for i in range(len(state.dag.release_candidates()))]
    acts += [Action(ActionKind.CONSIDER, i + 1) for i in range(len(state.dag.consider_candidates()))]
    acts.append(CONTINUE)
    return acts


# -- transition machinery ----------------------------------------------------


def _update_choices(res) -> tuple[BlockId, ...]:
    return tuple(res) if isinstance(res, (tuple, list)) else (res,)


def _deliver(dag: BlockDag, protocol: ProtocolSpec, fast: bool) -> list[tuple[float, BlockDag]]:
    """Hand every communicable unknown block to the defender.

    Released blocks take priority on the fast branch, foreign blocks on the
    slow branch, subject to parents being delivered first.  Each delivery
    marks the block known and lets the protocol update the defender's
    preference; multi-valued updates fork the outcome uniformly.
    """
    done: list[tuple[float, BlockDag]] = []
    first = WithholdStatus.RELEASED if fast else WithholdStatus.FOREIGN

    def step(d: BlockDag, frac: float) -> None:
        while True:
            ready = [
                b
                for b in d.blocks()
                if d.view(b) == DefenderView.UNKNOWN
                and d.withhold(b) != WithholdStatus.WITHHELD
                and all(d.view(p) != DefenderView.UNKNOWN for p in d.parents(b))
            ]
            if not ready:
                done.append((frac, d))
                return
            pick = min(ready, key=lambda b: (d.withhold(b) != first, b))
            d.mark_known(pick)
            res = protocol.update(defender_view(d), d.preferred_by_defender(), pick)
            choices = _update_choices(res)
            if len(choices) == 1:
                d.set_preferred_by_defender(choices[0])
                continue
            for ch in choices:
                dd = d.clone()
                dd.set_preferred_by_defender(ch)
                step(dd, frac / len(choices))
            return

    step(dag, 1.0)
    return done


def _mine(
    dag: BlockDag, protocol: ProtocolSpec, attacker: bool, limit: int
) -> tuple[BlockId, tuple[BlockId, ...], Miner] | None:
    """Append the next block unless the height cap or slot rule forbids it.

    At most one block per (parent list, miner) may exist: a second one is
    indistinguishable to both participants, and admitting it would make the
    reachable space unbounded under a pure height cap.
    """
    if dag.max_height() >= limit:
        return None
    if attacker:
        v = attacker_view(dag)
        parents = tuple(protocol.mining(v, dag.preferred_by_attacker()))
        miner, withhold = Miner.ATTACKER, WithholdStatus.WITHHELD
    else:
        v = defender_view(dag)
        parents = tuple(protocol.mining(v, dag.preferred_by_defender()))
        miner, withhold = Miner.DEFENDER, WithholdStatus.FOREIGN
    if any(not v.visible(p) for p in parents):
        raise InvariantError(f"{protocol.name}.mining referenced an invisible block")
    for b in dag.blocks():
        if dag.miner(b) == miner and dag.parents(b) == parents:
            return None
    return dag.append_block(parents, withhold), parents, miner


def _settle(dag: BlockDag, protocol: ProtocolSpec):
    """Charge and drop the freshly agreed history; returns the id mapping too.

    The truncation target starts at the latest common ancestor of the two
    preferred histories and steps toward the root while any survivor would
    keep a parent reference to a removed block (uncle references can point
    below the preference LCA).
    """
    full = DagView(dag)

    def prev(b: BlockId):
        return protocol.previous(full, b)

    target = latest_common_ancestor(dag, prev)
    while target != 0:
        keep = dag.descendants(target)
        keep.add(target)
        if all(
            p in keep for s in keep if s != target for p in dag.parents(s)
        ):
            break
        target = prev(target)
    if target == 0:
        return 0.0, 0.0, 0.0, {b: b for b in dag.blocks()}
    progress = protocol.progress(full, target) - protocol.progress(full, 0)
    ra = rd = 0.0
    b = prev(target)
    while b is not None:
        for entry in protocol.coinbase(full, b):
            if entry.miner == Miner.ATTACKER:
                ra += entry.amount
            else:
                rd += entry.amount
        b = prev(b)
    mapping = dag.truncate(target)
    return ra, rd, progress, mapping


def settle(dag: BlockDag, protocol: ProtocolSpec) -> tuple[float, float, float]:
    """Public form of the settlement step: mutates ``dag``, returns rewards."""
    ra, rd, progress, _ = _settle(dag, protocol)
    return ra, rd, progress


def _finish(
    dag: BlockDag,
    weight: Weight,
    protocol: ProtocolSpec,
    trace: bool,
    appended=None,
    canonical: bool = True,
) -> Outcome:
    ra, rd, progress, mapping = _settle(dag, protocol)
    if not canonical:
        succ = AttackState(raw_key(dag), dag)
        return Outcome(weight, succ, ra, rd, progress)
    key, rep, order = rebuild(dag)
    succ = AttackState(key, rep)
    if not trace:
        return Outcome(weight, succ, ra, rd, progress)
    pos = {t: k for k, t in enumerate(order)}
    idmap = {old: pos[new] for old, new in mapping.items()}
    return Outcome(weight, succ, ra, rd, progress, idmap=idmap, appended=appended)


def outcomes(
    state: AttackState,
    action: Action,
    protocol: ProtocolSpec,
    limit: int,
    aclass: int = 1,
    gclass: int = 1,
    trace: bool = False,
    canonical: bool = True,
) -> list[Outcome]:
    """Pre-merge outcomes of one action, with symbolic probability weights.

    ``aclass``/``gclass`` flag boundary values of alpha/gamma so that
    zero-probability branches are dropped structurally.
    """
    d = state.dag
    if action.kind == ActionKind.RELEASE:
        cands = d.release_candidates()
        if not 1 <= action.index <= len(cands):
            raise InvariantError(f"no release candidate {action.index}")
        dd = d.clone()
        dd.mark_released(cands[action.index - 1])
        return [_finish(dd, Weight(1.0), protocol, trace, canonical=canonical)]

    if action.kind == ActionKind.CONSIDER:
        cands = d.consider_candidates()
        if not 1 <= action.index <= len(cands):
            raise InvariantError(f"no consider candidate {action.index}")
        dd = d.clone()
        cand = cands[action.index - 1]
        dd.mark_considered(cand)
        res = protocol.update(attacker_view(dd), dd.preferred_by_attacker(), cand)
        choices = _update_choices(res)
        out = []
        for ch in choices:
            di = dd.clone() if len(choices) > 1 else dd
            di.set_preferred_by_attacker(ch)
            out.append(
                _finish(
                    di, Weight(1.0 / len(choices)), protocol, trace, canonical=canonical
                )
            )
        return out

    out = []
    for fast, ec, ed in ((True, 1, 0), (False, 0, 1)):
        if (gclass == 0 and fast) or (gclass == 2 and not fast):
            continue
        for frac, delivered in _deliver(d.clone(), protocol, fast):
            for attacker, ea, eb in ((True, 1, 0), (False, 0, 1)):
                if (aclass == 0 and attacker) or (aclass == 2 and not attacker):
                    continue
                d2 = delivered.clone()
                appended = _mine(d2, protocol, attacker, limit)
                out.append(
                    _finish(
                        d2,
                        Weight(frac, ea, eb, ec, ed),
                        protocol,
                        trace,
                        appended,
                        canonical=canonical,
                    )
                )
    return out


def transitions(
    state: AttackState, action: Action, params: ModelParams, protocol: ProtocolSpec
) -> list[Transition]:
    """Numeric transitions of one action; equal outcomes are merged."""
    merged: dict[tuple, float] = {}
    order: list[tuple] = []
    for o in outcomes(
        state, action, protocol, params.limit, _cls(params.alpha), _cls(params.gamma)
    ):
        sig = (o.successor.key, o.reward_attacker, o.reward_defender, o.progress)
        if sig not in merged:
            merged[sig] = 0.0
            order.append(sig)
        merged[sig] += o.weight.value(params.alpha, params.gamma)
    return [
        Transition(merged[sig], sig[0], sig[1], sig[2], sig[3]) for sig in order
    ]
