"""Longest-chain protocol with uncle rewards (simplified Ethereum).

Preference and progress follow the first-parent chain only; uncle references
add rewards but never affect which chain wins.  Chain position is measured by
"number" (size of the sequential history) rather than the generic
shortest-path height, because an uncle reference may create a shorter path to
the root than the chain itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .blockdag import BlockId
from .errors import InvariantError
from .protocol import DagView, ProtocolSpec, RewardEntry, register_protocol


def _default_uncle_reward(d: int) -> float:
    return (8 - d) / 8


@dataclass(frozen=True)
class EthereumParams:
    max_uncle_depth: int = 6
    max_uncles: int = 2
    nephew_reward: float = 1 / 32
    uncle_reward: object = field(default=_default_uncle_reward)


@register_protocol
class Ethereum(ProtocolSpec):
    name = "ethereum"

    def __init__(self, params: EthereumParams = EthereumParams()):
        self.params = params

    def cache_token(self) -> str:
        p = self.params
        return (
            f"{self.name}-d{p.max_uncle_depth}-u{p.max_uncles}-n{p.nephew_reward:.6g}"
        )

    def number(self, v: DagView, b: BlockId) -> int:
        """1-based position on the first-parent chain."""
        n = 1
        ps = v.parents(b)
        while ps:
            n += 1
            ps = v.parents(ps[0])
        return n

    def mining(self, v: DagView, preferred: BlockId) -> tuple[BlockId, ...]:
        """Preferred tip first, then up to ``max_uncles`` eligible uncles.

        A visible block is an eligible uncle if it is neither part of the
        preferred sequential history nor referenced by any block in it, and
        its chain position is between 1 and ``max_uncle_depth`` slots below
        the block being mined.  Candidates are taken in canonical order.
        """
        history = set(self.history(v, preferred))
        referenced = {p for h in history for p in v.parents(h)}
        new_number = self.number(v, preferred) + 1
        uncles = []
        for u in v.blocks():
            if u in history or u in referenced:
                continue
            d = new_number - self.number(v, u)
            if 1 <= d <= self.params.max_uncle_depth:
                uncles.append(u)
                if len(uncles) == self.params.max_uncles:
                    break
        return (preferred, *uncles)

    def update(self, v: DagView, current: BlockId, incoming: BlockId) -> BlockId:
        return incoming if self.number(v, incoming) > self.number(v, current) else current

    def previous(self, v: DagView, b: BlockId) -> BlockId | None:
        ps = v.parents(b)
        return ps[0] if ps else None

    def progress(self, v: DagView, b: BlockId) -> float:
        return float(self.number(v, b))

    def coinbase(self, v: DagView, b: BlockId) -> list[RewardEntry]:
        """1 for the miner, plus uncle and nephew rewards per referenced uncle."""
        out = [RewardEntry(v.miner(b), 1.0)]
        nb = self.number(v, b)
        for u in v.parents(b)[1:]:
            d = nb - self.number(v, u)
            if not 1 <= d <= self.params.max_uncle_depth:
                raise InvariantError(f"block {b} references uncle {u} at illegal depth {d}")
            out.append(RewardEntry(v.miner(u), self.params.uncle_reward(d)))
            out.append(RewardEntry(v.miner(b), self.params.nephew_reward))
        return out
