"""Longest-chain protocol with single-parent blocks and unit rewards."""

from __future__ import annotations

from .blockdag import BlockId
from .protocol import DagView, ProtocolSpec, RewardEntry, register_protocol


@register_protocol
class Bitcoin(ProtocolSpec):
    """Nakamoto consensus: mine on the preferred tip, prefer the higher block.

    Ties keep the currently preferred block (first seen wins), which is what
    makes communication advantage matter for the attacker.
    """

    name = "bitcoin"

    def mining(self, v: DagView, preferred: BlockId) -> tuple[BlockId, ...]:
        return (preferred,)

    def update(self, v: DagView, current: BlockId, incoming: BlockId) -> BlockId:
        return incoming if v.height(incoming) > v.height(current) else current

    def previous(self, v: DagView, b: BlockId) -> BlockId | None:
        ps = v.parents(b)
        return ps[0] if ps else None

    def progress(self, v: DagView, b: BlockId) -> float:
        return v.height(b) + 1.0

    def coinbase(self, v: DagView, b: BlockId) -> list[RewardEntry]:
        return [RewardEntry(v.miner(b), 1.0)]
