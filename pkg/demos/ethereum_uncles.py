"""
Uncle rewards change the attack surface
=======================================

Ethereum-style protocols pay stale blocks ("uncles") when a later block
references them.  The same generic machinery derives the MDP; only the five
protocol functions differ from Bitcoin.
"""

from fractions import Fraction

from dagmdp import (
    BlockDag,
    DagView,
    Ethereum,
    ModelParams,
    WithholdStatus,
    evaluate_policy,
    explore,
    honest_policy,
)

protocol = Ethereum()

# Build a small fork by hand: the defender mines block 1, the attacker mines
# the competing block 2, and the defender's next block extends 1 while
# referencing 2 as an uncle.
dag = BlockDag()
b1 = dag.append_block((0,), WithholdStatus.FOREIGN)
b2 = dag.append_block((0,), WithholdStatus.WITHHELD)
view = DagView(dag)
nephew_parents = protocol.mining(view, preferred=b1)
print(f"mining on block {b1} references parents {nephew_parents}")
b3 = dag.append_block(nephew_parents, WithholdStatus.FOREIGN)
view = DagView(dag)

# The uncle (depth 1) earns 7/8, and the referencing block earns a 1/32
# bonus on top of its own unit reward.
print(f"coinbase of block {b3}:")
for entry in protocol.coinbase(view, b3):
    print(f"  miner={entry.miner.name:<8} amount={Fraction(entry.amount)}")

# Progress counts sequential blocks only, so the uncle buys the attacker
# revenue without advancing the chain -- withholding economics shift.
print(f"progress at tip: {protocol.progress(view, b3)}")

# The derived MDP stays exact: honest mining still earns the fair share.
for alpha in (0.2, 0.3, 0.4):
    m = explore(protocol, ModelParams(alpha=alpha, gamma=0.5, limit=2))
    r = evaluate_policy(m, honest_policy(m))
    print(f"alpha={alpha}: {m.n_states} states, honest revenue {r.revenue:.9f}")
