"""Labeled BlockDAG state.

The attack model tracks one DAG shared by both participants.  Each block
carries three independent labels: what the defender has seen of it, whether
the attacker takes it into account, and whether the attacker is withholding
it.  Defender-mined blocks are Foreign forever; attacker-mined blocks start
Withheld and may be Released.
"""

from __future__ import annotations

from enum import IntEnum

from .errors import InvariantError

BlockId = int


class DefenderView(IntEnum):
    """What the defender knows about a block."""

    UNKNOWN = 0
    KNOWN = 1
    PREFERRED = 2


class IgnoreStatus(IntEnum):
    """Whether the attacker takes a block into account."""

    IGNORED = 0
    CONSIDERED = 1
    PREFERRED = 2


class WithholdStatus(IntEnum):
    """Whether a block has been communicated.  Foreign = defender-mined."""

    FOREIGN = 0
    WITHHELD = 1
    RELEASED = 2


class Miner(IntEnum):
    ATTACKER = 0
    DEFENDER = 1


Labels = tuple[DefenderView, IgnoreStatus, WithholdStatus]


def color_of(view: DefenderView, ignore: IgnoreStatus, withhold: WithholdStatus) -> int:
    """Encode a label triple as one of 27 vertex colors (base 3, view high digit)."""
    return 9 * int(view) + 3 * int(ignore) + int(withhold)


def labels_of(color: int) -> Labels:
    """Inverse of :func:`color_of`."""
    if not 0 <= color < 27:
        raise ValueError(f"vertex color out of range: {color}")
    return (DefenderView(color // 9), IgnoreStatus(color // 3 % 3), WithholdStatus(color % 3))


_VIEW_WORDS = ("unknown", "known", "preferred")
_IGNORE_WORDS = ("ignored", "considered", "preferred")
_WITHHOLD_WORDS = ("foreign", "withheld", "released")


class BlockDag:
    """Append-only DAG of labeled blocks.

    Block ids are dense ints assigned in insertion order, so ids are always a
    topological order (parents have smaller ids).  Candidate lists and
    children are reported in ascending id order; on a canonically rebuilt DAG
    (see module ``canonical``) that coincides with the canonical vertex order.
    """

    __slots__ = ("_parents", "_children", "_view", "_ignore", "_withhold")

    def __init__(self, genesis_withhold: WithholdStatus = WithholdStatus.RELEASED):
        if genesis_withhold == WithholdStatus.WITHHELD:
            raise InvariantError("genesis cannot be withheld: both parties prefer it")
        self._parents: list[tuple[BlockId, ...]] = [()]
        self._children: list[list[BlockId]] = [[]]
        self._view = [int(DefenderView.PREFERRED)]
        self._ignore = [int(IgnoreStatus.PREFERRED)]
        self._withhold = [int(genesis_withhold)]

    @classmethod
    def from_parts(
        cls, parents: list[tuple[BlockId, ...]], colors: list[int]
    ) -> "BlockDag":
        """Rebuild a DAG from per-block parent tuples and vertex colors.

        Block 0 must be the unique root and ids must be topological.
        """
        if not parents or parents[0] != ():
            raise InvariantError("block 0 must be the parentless root")
        if len(parents) != len(colors):
            raise InvariantError("parents and colors must have equal length")
        d = cls.__new__(cls)
        d._parents = []
        d._children = [[] for _ in parents]
        d._view, d._ignore, d._withhold = [], [], []
        for b, (ps, color) in enumerate(zip(parents, colors)):
            if b > 0 and not ps:
                raise InvariantError(f"block {b}: only the root may lack parents")
            if any(not 0 <= p < b for p in ps):
                raise InvariantError(f"block {b}: parent ids must be smaller than {b}")
            view, ignore, withhold = labels_of(color)
            d._parents.append(tuple(ps))
            d._view.append(int(view))
            d._ignore.append(int(ignore))
            d._withhold.append(int(withhold))
            for p in ps:
                d._children[p].append(b)
        d.check_invariants()
        return d

    # -- structure ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._parents)

    def blocks(self) -> range:
        return range(len(self._parents))

    def parents(self, b: BlockId) -> tuple[BlockId, ...]:
        return self._parents[b]

    def children(self, b: BlockId) -> tuple[BlockId, ...]:
        return tuple(self._children[b])

    def heights(self) -> list[int]:
        """Shortest-path-to-root length per block (ids are topological)."""
        hs: list[int] = []
        for ps in self._parents:
            hs.append(0 if not ps else 1 + min(hs[p] for p in ps))
        return hs

    def max_height(self) -> int:
        return max(self.heights())

    # -- labels ------------------------------------------------------------

    def view(self, b: BlockId) -> DefenderView:
        return DefenderView(self._view[b])

    def ignore(self, b: BlockId) -> IgnoreStatus:
        return IgnoreStatus(self._ignore[b])

    def withhold(self, b: BlockId) -> WithholdStatus:
        return WithholdStatus(self._withhold[b])

    def labels(self, b: BlockId) -> Labels:
        return (self.view(b), self.ignore(b), self.withhold(b))

    def color(self, b: BlockId) -> int:
        return 9 * self._view[b] + 3 * self._ignore[b] + self._withhold[b]

    def miner(self, b: BlockId) -> Miner:
        return Miner.DEFENDER if self._withhold[b] == WithholdStatus.FOREIGN else Miner.ATTACKER

    def preferred_by_defender(self) -> BlockId:
        return self._view.index(int(DefenderView.PREFERRED))

    def preferred_by_attacker(self) -> BlockId:
        return self._ignore.index(int(IgnoreStatus.PREFERRED))

    # -- growth and label promotion ----------------------------------------

    def append_block(
        self,
        parents: tuple[BlockId, ...] | list[BlockId],
        withhold: WithholdStatus,
    ) -> BlockId:
        """Append a freshly mined block, labeled (Unknown, Ignored, withhold)."""
        ps = tuple(parents)
        if not ps:
            raise InvariantError("a mined block needs at least one parent")
        if len(set(ps)) != len(ps):
            raise InvariantError("duplicate parent reference")
        if any(not 0 <= p < len(self) for p in ps):
            raise InvariantError(f"unknown parent in {ps}")
        if withhold == WithholdStatus.RELEASED:
            raise InvariantError("a block cannot be mined already released")
        b = len(self._parents)
        self._parents.append(ps)
        self._children.append([])
        self._view.append(int(DefenderView.UNKNOWN))
        self._ignore.append(int(IgnoreStatus.IGNORED))
        self._withhold.append(int(withhold))
        for p in ps:
            self._children[p].append(b)
        return b

    def mark_released(self, b: BlockId) -> None:
        if self._withhold[b] != WithholdStatus.WITHHELD:
            raise InvariantError(f"block {b} is not withheld")
        if any(self._withhold[p] == WithholdStatus.WITHHELD for p in self._parents[b]):
            raise InvariantError(f"block {b} has a withheld parent; release in topological order")
        self._withhold[b] = int(WithholdStatus.RELEASED)

    def mark_considered(self, b: BlockId) -> None:
        if self._ignore[b] != IgnoreStatus.IGNORED:
            raise InvariantError(f"block {b} is not ignored")
        if any(self._ignore[p] == IgnoreStatus.IGNORED for p in self._parents[b]):
            raise InvariantError(f"block {b} has an ignored parent; consider in topological order")
        self._ignore[b] = int(IgnoreStatus.CONSIDERED)

    def mark_known(self, b: BlockId) -> None:
        if self._view[b] != DefenderView.UNKNOWN:
            raise InvariantError(f"block {b} is already known to the defender")
        if any(self._view[p] == DefenderView.UNKNOWN for p in self._parents[b]):
            raise InvariantError(f"block {b} has an unknown parent; deliver in topological order")
        self._view[b] = int(DefenderView.KNOWN)

    def set_preferred_by_defender(self, b: BlockId) -> None:
        """Move the defender's preference; the block must already be known."""
        old = self.preferred_by_defender()
        if b == old:
            return
        if self._view[b] != DefenderView.KNOWN:
            raise InvariantError(f"block {b} must be known before it can be preferred")
        self._view[old] = int(DefenderView.KNOWN)
        self._view[b] = int(DefenderView.PREFERRED)

    def set_preferred_by_attacker(self, b: BlockId) -> None:
        """Move the attacker's preference; the block must already be considered."""
        old = self.preferred_by_attacker()
        if b == old:
            return
        if self._ignore[b] != IgnoreStatus.CONSIDERED:
            raise InvariantError(f"block {b} must be considered before it can be preferred")
        self._ignore[old] = int(IgnoreStatus.CONSIDERED)
        self._ignore[b] = int(IgnoreStatus.PREFERRED)

    # -- action candidates ---------------------------------------------------

    def release_candidates(self) -> list[BlockId]:
        """Withheld blocks with no withheld parent, ascending id."""
        return [
            b
            for b in self.blocks()
            if self._withhold[b] == WithholdStatus.WITHHELD
            and all(self._withhold[p] != WithholdStatus.WITHHELD for p in self._parents[b])
        ]

    def consider_candidates(self) -> list[BlockId]:
        """Ignored blocks with no ignored parent, ascending id."""
        return [
            b
            for b in self.blocks()
            if self._ignore[b] == IgnoreStatus.IGNORED
            and all(self._ignore[p] != IgnoreStatus.IGNORED for p in self._parents[b])
        ]

    # -- truncation ----------------------------------------------------------

    def descendants(self, b: BlockId) -> set[BlockId]:
        """All blocks reachable from ``b`` via child edges, excluding ``b``."""
        seen: set[BlockId] = set()
        stack = list(self._children[b])
        while stack:
            c = stack.pop()
            if c not in seen:
                seen.add(c)
                stack.extend(self._children[c])
        return seen

    def truncate(self, new_genesis: BlockId) -> dict[BlockId, BlockId]:
        """Drop everything that does not descend from ``new_genesis``.

        The surviving blocks are renumbered (relative order kept, so ids stay
        topological) and ``new_genesis`` becomes the parentless root.  Returns
        the old-id -> new-id mapping of the survivors.  Raises if a survivor
        references a removed block other than through the new root: callers
        must pick a truncation point without dangling references.
        """
        keep = self.descendants(new_genesis)
        keep.add(new_genesis)
        order = sorted(keep)
        mapping = {old: new for new, old in enumerate(order)}
        for old in order:
            if old != new_genesis and any(p not in keep for p in self._parents[old]):
                raise InvariantError(
                    f"truncation at {new_genesis} would leave block {old} "
                    "with a dangling parent reference"
                )
        self._parents = [
            () if old == new_genesis else tuple(mapping[p] for p in self._parents[old])
            for old in order
        ]
        self._view = [self._view[old] for old in order]
        self._ignore = [self._ignore[old] for old in order]
        self._withhold = [self._withhold[old] for old in order]
        self._children = [[] for _ in order]
        for b, ps in enumerate(self._parents):
            for p in ps:
                self._children[p].append(b)
        return mapping

    # -- misc ---------------------------------------------------------------

    def clone(self) -> "BlockDag":
        d = BlockDag.__new__(BlockDag)
        d._parents = list(self._parents)
        d._children = [list(cs) for cs in self._children]
        d._view = list(self._view)
        d._ignore = list(self._ignore)
        d._withhold = list(self._withhold)
        return d

    def check_invariants(self) -> None:
        """Raise InvariantError unless every structural label rule holds."""
        n = len(self._parents)
        if n == 0 or self._parents[0] != ():
            raise InvariantError("block 0 must be the unique parentless root")
        for b in range(1, n):
            if not self._parents[b]:
                raise InvariantError(f"block {b} lacks parents; single root required")
            if any(p >= b for p in self._parents[b]):
                raise InvariantError(f"block {b}: ids must be topological")
        if self._view.count(int(DefenderView.PREFERRED)) != 1:
            raise InvariantError("exactly one block must be preferred by the defender")
        if self._ignore.count(int(IgnoreStatus.PREFERRED)) != 1:
            raise InvariantError("exactly one block must be preferred by the attacker")
        if self._view[0] == DefenderView.UNKNOWN:
            raise InvariantError("genesis is never unknown")
        if self._ignore[0] == IgnoreStatus.IGNORED:
            raise InvariantError("genesis is never ignored")
        if self._withhold[0] == WithholdStatus.WITHHELD:
            raise InvariantError("genesis is never withheld")
        for b in range(n):
            for p in self._parents[b]:
                if self._view[b] != DefenderView.UNKNOWN and self._view[p] == DefenderView.UNKNOWN:
                    raise InvariantError(f"known block {b} has unknown parent {p}")
                if self._ignore[b] != IgnoreStatus.IGNORED and self._ignore[p] == IgnoreStatus.IGNORED:
                    raise InvariantError(f"considered block {b} has ignored parent {p}")
                if self._withhold[b] == WithholdStatus.RELEASED and self._withhold[p] == WithholdStatus.WITHHELD:
                    raise InvariantError(f"released block {b} has withheld parent {p}")

    def dump(self) -> str:
        """One line per block: ``id parents=[...] miner view ignore withhold``."""
        lines = []
        for b in self.blocks():
            miner = "attacker" if self.miner(b) == Miner.ATTACKER else "defender"
            lines.append(
                f"{b} parents={list(self._parents[b])} {miner} "
                f"{_VIEW_WORDS[self._view[b]]} {_IGNORE_WORDS[self._ignore[b]]} "
                f"{_WITHHOLD_WORDS[self._withhold[b]]}"
            )
        return "\n".join(lines)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<BlockDag n={len(self)} heights={self.heights()}>"


def latest_common_ancestor(dag: BlockDag, previous) -> BlockId:
    """Deepest block shared by both preferred histories.

    ``previous`` maps a block id to its predecessor id (or None at the root)
    and is normally the protocol's sequential-history step on the full view.
    Histories are suffix-closed under ``previous``, so the first block of the
    defender's history that also lies on the attacker's is the deepest one.
    """
    attacker_chain = set()
    b: BlockId | None = dag.preferred_by_attacker()
    while b is not None:
        attacker_chain.add(b)
        b = previous(b)
    b = dag.preferred_by_defender()
    while b is not None:
        if b in attacker_chain:
            return b
        b = previous(b)
    raise InvariantError("preferred histories share no block; single root expected")
