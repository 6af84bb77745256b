"""Canonical keys for labeled BlockDAGs.

Two DAGs get the same key exactly when some block bijection preserves vertex
colors (the 27 label triples) and ordered parent lists.  The key doubles as a
compact serialization: it lists, per block in canonical order, the color and
the parent positions, so the DAG can be rebuilt from the key alone.

The canonical order is found by backtracking over the topological orders of
the DAG, restricted at every step to the available blocks of minimal refined
color, and keeping the lexicographically smallest serialization.  Iterated
color refinement (seeded with label color, degrees and height) discriminates
almost every vertex in practice, so the search rarely branches.
"""

from __future__ import annotations

from .blockdag import BlockDag, BlockId
from .errors import InvariantError


def refined_colors(dag: BlockDag) -> list[int]:
    """Stable partition of the blocks into isomorphism-invariant classes."""
    heights = dag.heights()
    sig = [
        (dag.color(b), len(dag.parents(b)), len(dag.children(b)), heights[b])
        for b in dag.blocks()
    ]
    colors = _ranks(sig)
    for _ in range(len(colors)):
        sig = [
            (
                colors[b],
                tuple(colors[p] for p in dag.parents(b)),
                tuple(sorted(colors[c] for c in dag.children(b))),
            )
            for b in dag.blocks()
        ]
        new = _ranks(sig)
        if new == colors:
            break
        colors = new
    return colors


def _ranks(signatures: list) -> list[int]:
    rank = {s: i for i, s in enumerate(sorted(set(signatures)))}
    return [rank[s] for s in signatures]


def canonical_form(dag: BlockDag) -> tuple[bytes, list[BlockId]]:
    """Return (canonical key, canonical order).

    ``order[k]`` is the block placed at canonical position ``k``; the order is
    always topological, so position 0 is the root.
    """
    n = len(dag)
    if n > 255:
        raise InvariantError("canonical keys support at most 255 blocks")
    colors = refined_colors(dag)
    parents = [dag.parents(b) for b in dag.blocks()]
    children = [dag.children(b) for b in dag.blocks()]
    vcolor = [dag.color(b) for b in dag.blocks()]
    missing = [len(ps) for ps in parents]

    best: bytes | None = None
    best_order: list[int] = []
    prefix = bytearray([n])
    order: list[int] = []
    pos = [0] * n
    available = [b for b in range(n) if missing[b] == 0]

    def walk(avail: list[int], ahead: bool) -> None:
        nonlocal best, best_order
        if not avail:
            cand = bytes(prefix)
            if best is None or cand < best:
                best, best_order = cand, list(order)
            return
        low = min(colors[b] for b in avail)
        for b in avail:
            if colors[b] != low:
                continue
            chunk = bytes([vcolor[b], len(parents[b]), *(pos[p] for p in parents[b])])
            child_ahead = ahead
            if not ahead and best is not None:
                ref = best[len(prefix) : len(prefix) + len(chunk)]
                if chunk > ref:
                    continue
                child_ahead = chunk < ref
            pos[b] = len(order)
            order.append(b)
            prefix.extend(chunk)
            nxt = [a for a in avail if a != b]
            for c in children[b]:
                missing[c] -= 1
                if missing[c] == 0:
                    nxt.append(c)
            walk(nxt, child_ahead)
            for c in children[b]:
                missing[c] += 1
            del prefix[len(prefix) - len(chunk) :]
            order.pop()

    walk(available, False)
    assert best is not None
    return best, best_order


def canonical_key(dag: BlockDag) -> bytes:
    return canonical_form(dag)[0]


def raw_key(dag: BlockDag) -> bytes:
    """Serialize in insertion order, skipping the canonical search.

    Only useful for debugging: raw keys distinguish DAGs that are
    isomorphic but were built in different orders.
    """
    n = len(dag)
    if n > 255:
        raise InvariantError("state keys support at most 255 blocks")
    out = bytearray([n])
    for b in dag.blocks():
        ps = dag.parents(b)
        out.extend((dag.color(b), len(ps), *ps))
    return bytes(out)


def canonical_order(dag: BlockDag) -> list[BlockId]:
    return canonical_form(dag)[1]


def dag_from_key(key: bytes) -> BlockDag:
    """Rebuild the canonical representative encoded by ``key``."""
    if not key or key[0] == 0:
        raise InvariantError("malformed state key")
    n = key[0]
    parents: list[tuple[int, ...]] = []
    colors: list[int] = []
    i = 1
    for _ in range(n):
        if i + 2 > len(key):
            raise InvariantError("truncated state key")
        color, np_ = key[i], key[i + 1]
        i += 2
        ps = tuple(key[i : i + np_])
        if len(ps) != np_:
            raise InvariantError("truncated state key")
        i += np_
        parents.append(ps)
        colors.append(color)
    if i != len(key):
        raise InvariantError("trailing bytes in state key")
    return BlockDag.from_parts(parents, colors)


def rebuild(dag: BlockDag) -> tuple[bytes, BlockDag, list[BlockId]]:
    """Canonicalize: return (key, canonical representative, order).

    In the representative, block ids equal canonical positions, so candidate
    lists and children come out in canonical order.  ``order[k]`` gives the
    id in ``dag`` of the representative's block ``k``.
    """
    key, order = canonical_form(dag)
    pos = {b: k for k, b in enumerate(order)}
    parts = [tuple(pos[p] for p in dag.parents(b)) for b in order]
    colors = [dag.color(b) for b in order]
    return key, BlockDag.from_parts(parts, colors), order
