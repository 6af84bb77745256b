"""Protocol specification API.

A consensus protocol is described by five pure functions over a restricted
view of the BlockDAG.  The attack model evaluates them against the views of
the two participants; the functions themselves never see labels, only the
visible subgraph.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blockdag import BlockDag, BlockId, Miner
from .errors import InvariantError


class DagView:
    """Read-only window onto a :class:`BlockDag`.

    ``visible`` restricts which blocks exist as far as the protocol is
    concerned; it must be closed under parents (checked on construction).
    Heights are measured inside the view, i.e. shortest path to the root,
    which equals the full-DAG height because visibility is parent-closed.
    """

    __slots__ = ("_dag", "_visible", "_heights")

    def __init__(self, dag: BlockDag, visible: list[bool] | None = None):
        if visible is None:
            visible = [True] * len(dag)
        if len(visible) != len(dag):
            raise InvariantError("visibility vector length mismatch")
        if not visible[0]:
            raise InvariantError("the root must be visible in every view")
        for b in dag.blocks():
            if visible[b] and any(not visible[p] for p in dag.parents(b)):
                raise InvariantError(f"visible block {b} has an invisible parent")
        self._dag = dag
        self._visible = visible
        self._heights: dict[BlockId, int] = {}

    def visible(self, b: BlockId) -> bool:
        return self._visible[b]

    def blocks(self) -> list[BlockId]:
        return [b for b in self._dag.blocks() if self._visible[b]]

    def _check(self, b: BlockId) -> None:
        if not 0 <= b < len(self._dag) or not self._visible[b]:
            raise InvariantError(f"block {b} is not visible in this view")

    def parents(self, b: BlockId) -> tuple[BlockId, ...]:
        """Parents in mining-time attachment order."""
        self._check(b)
        return self._dag.parents(b)

    def children(self, b: BlockId) -> tuple[BlockId, ...]:
        """Visible children, ascending id."""
        self._check(b)
        return tuple(c for c in self._dag.children(b) if self._visible[c])

    def miner(self, b: BlockId) -> Miner:
        self._check(b)
        return self._dag.miner(b)

    def height(self, b: BlockId) -> int:
        """Length of the shortest path from ``b`` to the root."""
        self._check(b)
        h = self._heights.get(b)
        if h is None:
            ps = self._dag.parents(b)
            h = 0 if not ps else 1 + min(self.height(p) for p in ps)
            self._heights[b] = h
        return h


@dataclass(frozen=True)
class RewardEntry:
    """One coinbase payout: who gets how much."""

    miner: Miner
    amount: float


class ProtocolSpec:
    """Base class for protocol specifications.

    Subclasses implement five pure functions.  All of them receive a
    :class:`DagView`; results may only depend on the visible subgraph, so
    repeated evaluation on the same view must return the same value.
    """

    name: str = "abstract"

    def mining(self, v: DagView, preferred: BlockId) -> tuple[BlockId, ...]:
        """Parent set for a block mined on ``preferred``, attachment order."""
        raise NotImplementedError

    def update(
        self, v: DagView, current: BlockId, incoming: BlockId
    ) -> BlockId | tuple[BlockId, ...]:
        """New preference after learning ``incoming``.

        Returns a single block, or a tuple of equally preferred blocks to
        model uniform tie breaking.
        """
        raise NotImplementedError

    def previous(self, v: DagView, b: BlockId) -> BlockId | None:
        """Predecessor in the sequential history, None at the root."""
        raise NotImplementedError

    def progress(self, v: DagView, b: BlockId) -> float:
        """Size of the sequential history of ``b``.  Monotone along it."""
        raise NotImplementedError

    def coinbase(self, v: DagView, b: BlockId) -> list[RewardEntry]:
        """Rewards minted by ``b`` when it enters the common history."""
        raise NotImplementedError

    def history(self, v: DagView, b: BlockId) -> list[BlockId]:
        """Sequential history of ``b``, tip first, via :meth:`previous`."""
        out = [b]
        p = self.previous(v, b)
        while p is not None:
            out.append(p)
            p = self.previous(v, p)
        return out

    def cache_token(self) -> str:
        """Identifier for memoization; must capture any tunable parameters."""
        return self.name


_REGISTRY: dict[str, type[ProtocolSpec]] = {}


def register_protocol(cls: type[ProtocolSpec]) -> type[ProtocolSpec]:
    """Class decorator: register a spec under its ``name``."""
    _REGISTRY[cls.name] = cls
    return cls


def protocol_names() -> list[str]:
    return sorted(_REGISTRY)


def protocol_by_name(name: str) -> ProtocolSpec:
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise InvariantError(
            f"unknown protocol {name!r}; known: {', '.join(protocol_names())}"
        ) from None
    return cls()
