import pytest

from dagmdp.blockdag import BlockDag


@pytest.fixture
def race_dag() -> BlockDag:
    """Six-block standoff: withheld attacker chain vs public defender fork.

    g <- a1 <- a2 <- a3 (attacker: two released, tip withheld+preferred)
    g <- d1 <- d2      (defender: d1 known+preferred, d2 undelivered)
    """
    parents = [(), (0,), (1,), (2,), (0,), (4,)]
    colors = [
        9 * 1 + 3 * 1 + 0,  # g: known, considered, foreign
        9 * 0 + 3 * 1 + 2,  # a1: unknown, considered, released
        9 * 0 + 3 * 1 + 2,  # a2: unknown, considered, released
        9 * 0 + 3 * 2 + 1,  # a3: unknown, preferred by attacker, withheld
        9 * 2 + 3 * 0 + 0,  # d1: preferred by defender, ignored, foreign
        9 * 0 + 3 * 0 + 0,  # d2: unknown, ignored, foreign
    ]
    return BlockDag.from_parts(parents, colors)
