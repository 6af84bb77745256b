"""
Optimal withholding beats honest mining
=======================================

Solve the derived Bitcoin MDP for the revenue-maximizing strategy at a given
mining share and compare it with honest behaviour, which earns exactly the
fair share.
"""

from dagmdp import (
    Bitcoin,
    ModelParams,
    dag_from_key,
    evaluate_policy,
    explore,
    honest_policy,
    pt_transform,
    value_iterate,
)

ALPHA, GAMMA, LIMIT = 0.35, 0.0, 6
HORIZON, EPSILON = 30.0, 0.01

m = explore(Bitcoin(), ModelParams(alpha=ALPHA, gamma=GAMMA, limit=LIMIT))
print(f"alpha={ALPHA} gamma={GAMMA} limit={LIMIT}: {m.n_states} states")

# Honest revenue is the baseline: always release, always consider, continue.
honest = evaluate_policy(m, honest_policy(m))
print(f"honest revenue:  {honest.revenue:.6f}  (fair share is {ALPHA})")

# The solver works on the probabilistically terminated copy of the MDP; the
# resulting policy is then scored exactly on the original chain.
sol = value_iterate(pt_transform(m, HORIZON), EPSILON)
best = evaluate_policy(m, sol.policy[: m.n_states])
print(f"optimal revenue: {best.revenue:.6f}  ({sol.iterations} sweeps)")
print(f"advantage:       {best.revenue - honest.revenue:+.6f}")

# Where do the strategies differ?  Show a few states where the optimizer
# withholds or overrides instead of complying.
hp = honest_policy(m)
shown = 0
for i in range(m.n_states):
    if sol.policy[i] == hp[i]:
        continue
    acts = m.actions[i]
    print(f"\nstate {i} ({m.states[i].hex()}):"
          f" honest={acts[hp[i]]}, optimal={acts[sol.policy[i]]}")
    print(dag_from_key(m.states[i]).dump())
    shown += 1
    if shown == 3:
        break
