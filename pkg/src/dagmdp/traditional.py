"""Hand-built Bitcoin selfish-mining MDP (the classical three-field model).

Serves as an independent reference for the generic DAG-derived model: both
are explored, transformed and solved through the same pipeline, and their
optimal revenues must agree.

State is (a, b, fork): attacker chain length, defender chain length since the
last common block, and whether a previously matched race is undecided.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .attack import Weight, _cls
from .errors import InvariantError


class Fork(IntEnum):
    IRRELEVANT = 0
    RELEVANT = 1
    ACTIVE = 2


@dataclass(frozen=True)
class ChainState:
    a: int
    b: int
    fork: Fork

    @property
    def key(self) -> bytes:
        return bytes((self.a, self.b, int(self.fork)))

    @classmethod
    def from_key(cls, key: bytes) -> "ChainState":
        if len(key) != 3:
            raise InvariantError("malformed chain-state key")
        return cls(key[0], key[1], Fork(key[2]))

    def __str__(self) -> str:
        return f"(a={self.a}, b={self.b}, {self.fork.name.lower()})"


@dataclass(frozen=True)
class ChainAction:
    name: str

    def __str__(self) -> str:
        return self.name


ADOPT = ChainAction("Adopt")
MATCH = ChainAction("Match")
OVERRIDE = ChainAction("Override")
WAIT = ChainAction("Wait")


class TraditionalModel:
    """Explorer adapter for the classical model.

    Mining that would push either chain past ``limit`` is suppressed (the
    state is left unchanged), mirroring the height cap of the generic model.
    """

    def __init__(self, limit: int, aclass: int = 1, gclass: int = 1):
        if limit < 1:
            raise InvariantError(f"limit must be at least 1, got {limit}")
        self.limit = limit
        self.aclass = aclass
        self.gclass = gclass
        self.meta = {
            "model": "traditional",
            "protocol": "bitcoin",
            "limit": limit,
            "aclass": aclass,
            "gclass": gclass,
        }

    def symbolic_starts(self):
        return [(Weight(1.0), ChainState(0, 0, Fork.IRRELEVANT))]

    def actions(self, s: ChainState) -> list[ChainAction]:
        acts = []
        if s.b >= 1:
            acts.append(ADOPT)
        if s.a >= s.b >= 1 and s.fork == Fork.RELEVANT and s.a < self.limit:
            acts.append(MATCH)
        if s.a > s.b:
            acts.append(OVERRIDE)
        acts.append(WAIT)
        return acts

    def expand(self, s: ChainState, action: ChainAction):
        a, b = s.a, s.b
        if action == ADOPT:
            return [_Out(Weight(1.0), ChainState(0, 0, Fork.IRRELEVANT), 0.0, float(b), float(b))]
        if action == OVERRIDE:
            return [
                _Out(
                    Weight(1.0),
                    ChainState(a - b - 1, 0, Fork.IRRELEVANT),
                    float(b + 1),
                    0.0,
                    float(b + 1),
                )
            ]
        if action == MATCH:
            return self._race(a, b)
        if s.fork == Fork.ACTIVE:
            return self._race(a, b)
        out = []
        if self.aclass != 0:
            nxt = ChainState(a + 1, b, Fork.IRRELEVANT) if a < self.limit else s
            out.append(_Out(Weight(1.0, ea=1), nxt, 0.0, 0.0, 0.0))
        if self.aclass != 2:
            nxt = ChainState(a, b + 1, Fork.RELEVANT) if b < self.limit else s
            out.append(_Out(Weight(1.0, eb=1), nxt, 0.0, 0.0, 0.0))
        return out

    def _race(self, a: int, b: int):
        """Common structure of Match and of waiting inside an active race.

        The defender mines on the attacker's exposed chain with probability
        gamma, which settles the attacker's first b blocks.
        """
        out = []
        if self.aclass != 0:
            nxt = ChainState(a + 1, b, Fork.ACTIVE) if a < self.limit else ChainState(a, b, Fork.ACTIVE)
            out.append(_Out(Weight(1.0, ea=1), nxt, 0.0, 0.0, 0.0))
        if self.aclass != 2:
            if self.gclass != 0:
                out.append(
                    _Out(
                        Weight(1.0, eb=1, ec=1),
                        ChainState(a - b, 1, Fork.RELEVANT),
                        float(b),
                        0.0,
                        float(b),
                    )
                )
            if self.gclass != 2:
                nxt = ChainState(a, b + 1, Fork.RELEVANT) if b < self.limit else ChainState(a, b, Fork.ACTIVE)
                out.append(_Out(Weight(1.0, eb=1, ed=1), nxt, 0.0, 0.0, 0.0))
        return out


class _Out:
    """Duck-typed outcome matching what the explorer consumes."""

    __slots__ = ("weight", "successor", "reward_attacker", "reward_defender", "progress")

    def __init__(self, weight, successor, ra, rd, progress):
        self.weight = weight
        self.successor = successor
        self.reward_attacker = ra
        self.reward_defender = rd
        self.progress = progress


def honest_chain_action(s: ChainState) -> ChainAction:
    """Adopt anything longer, publish anything ahead, otherwise wait."""
    if s.b > s.a:
        return ADOPT
    if s.a > s.b:
        return OVERRIDE
    return WAIT


def explore_traditional(params, budget: int | None = None):
    """Explicit MDP of the classical model for concrete parameters."""
    from .explore import (
        DEFAULT_BUDGET,
        explore_symbolic,
        instantiate,
        memoized_symbolic,
    )

    aclass, gclass = _cls(params.alpha), _cls(params.gamma)
    memo_key = ("traditional", params.limit, aclass, gclass)
    sym = memoized_symbolic(
        memo_key,
        lambda: explore_symbolic(
            TraditionalModel(params.limit, aclass, gclass),
            budget if budget is not None else DEFAULT_BUDGET,
        ),
    )
    return instantiate(sym, params.alpha, params.gamma)
