"""
Exploring the attack state space
================================

Derive the selfish-mining MDP for Bitcoin's longest-chain rule directly from
the protocol functions, and watch the state space grow with the height cap.
"""

from dagmdp import Bitcoin, ModelParams, dag_from_key, explore, mdp_stats

protocol = Bitcoin()

# The cap ("limit") bounds how far the DAG may grow before every branch is
# forced to settle.  Each extra unit of headroom roughly doubles the space.
print("limit  states  actions  transitions")
for limit in range(1, 6):
    m = explore(protocol, ModelParams(alpha=0.3, gamma=0.5, limit=limit))
    stats = mdp_stats(m)
    print(
        f"{limit:>5}  {stats['states']:>6}  {stats['actions']:>7}"
        f"  {stats['transitions']:>11}"
    )

# Every state is a canonicalized DAG.  Decode one and look at it: block 0 is
# always the (already settled) root, the labels after the parent list are the
# defender's view, the defender/attacker consideration, and withholding.
m = explore(protocol, ModelParams(alpha=0.3, gamma=0.5, limit=3))
key = max(m.states, key=lambda k: k[0])  # a largest DAG in the closure
print(f"\nlargest explored DAG ({key[0]} blocks, key {key.hex()}):")
print(dag_from_key(key).dump())
