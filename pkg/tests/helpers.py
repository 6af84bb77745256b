"""Shared test utilities: random labeled DAGs and a brute-force isomorphism check."""

import itertools
import random

from dagmdp.blockdag import BlockDag, IgnoreStatus, WithholdStatus


def random_dag(rng: random.Random, n: int) -> BlockDag:
    """Random labeled DAG, valid by construction.

    Structure first, then label promotions in topological order so the
    closure rules hold at every step.
    """
    d = BlockDag(rng.choice([WithholdStatus.RELEASED, WithholdStatus.FOREIGN]))
    for _ in range(n - 1):
        k = rng.randint(1, min(3, len(d)))
        ps = rng.sample(range(len(d)), k)
        d.append_block(ps, rng.choice([WithholdStatus.FOREIGN, WithholdStatus.WITHHELD]))
    for b in d.blocks():
        if rng.random() < 0.5 and b in d.release_candidates():
            d.mark_released(b)
        if rng.random() < 0.6 and b in d.consider_candidates():
            d.mark_considered(b)
        if rng.random() < 0.6 and all(
            d.view(p).value > 0 for p in d.parents(b)
        ) and d.view(b).value == 0:
            d.mark_known(b)
    known = [b for b in d.blocks() if d.view(b).value == 1]
    if known and rng.random() < 0.7:
        d.set_preferred_by_defender(rng.choice(known))
    considered = [b for b in d.blocks() if d.ignore(b) == IgnoreStatus.CONSIDERED]
    if considered and rng.random() < 0.7:
        d.set_preferred_by_attacker(rng.choice(considered))
    d.check_invariants()
    return d


def shuffled_copy(rng: random.Random, d: BlockDag) -> BlockDag:
    """Rebuild ``d`` under a random topological renumbering."""
    order: list[int] = []
    missing = {b: len(d.parents(b)) for b in d.blocks()}
    avail = [b for b in d.blocks() if missing[b] == 0]
    while avail:
        b = avail.pop(rng.randrange(len(avail)))
        order.append(b)
        for c in d.children(b):
            missing[c] -= 1
            if missing[c] == 0:
                avail.append(c)
    pos = {b: k for k, b in enumerate(order)}
    parts = [tuple(pos[p] for p in d.parents(b)) for b in order]
    colors = [d.color(b) for b in order]
    return BlockDag.from_parts(parts, colors)


def isomorphic(d1: BlockDag, d2: BlockDag) -> bool:
    """Brute force: some bijection preserves colors and ordered parent lists."""
    n = len(d1)
    if len(d2) != n:
        return False
    for perm in itertools.permutations(range(1, n)):
        m = dict(zip(range(1, n), perm))
        m[0] = 0
        if all(
            d1.color(b) == d2.color(m[b])
            and tuple(m[p] for p in d1.parents(b)) == d2.parents(m[b])
            for b in d1.blocks()
        ):
            return True
    return False


def structural_invariants(d: BlockDag) -> tuple:
    """Cheap isomorphism invariants used to bucket non-equal candidates."""
    return (
        len(d),
        tuple(sorted(d.color(b) for b in d.blocks())),
        tuple(sorted(len(d.parents(b)) for b in d.blocks())),
    )
