"""Solving explored MDPs for steady-state attacker revenue.

The average-reward objective is reduced to expected total reward by the
probabilistic-termination transform: every transition that makes progress
delta additionally jumps to an absorbing terminal state with probability
1 - (1 - 1/horizon)^delta, so an episode spans ``horizon`` progress units in
expectation.  Value iteration on the transformed model yields a policy whose
exact per-progress revenue is then measured on the untransformed chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attack import CONTINUE, ActionKind, Transition
from .errors import DegeneratePolicyError, InvariantError
from .explore import ExplicitMdp

TERMINAL_KEY = b""


def pt_transform(m: ExplicitMdp, horizon: float) -> ExplicitMdp:
    """Append a terminal state and split progress-making transitions."""
    if horizon <= 1.0:
        raise InvariantError(f"horizon must exceed 1, got {horizon}")
    if m.terminal is not None:
        raise InvariantError("model already has a terminal state")
    n = len(m.states)
    keep_base = 1.0 - 1.0 / horizon
    transitions = []
    for rows in m.transitions:
        out_rows = []
        for row in rows:
            out = []
            for t in row:
                keep = keep_base**t.progress
                if keep == 1.0:
                    out.append(t)
                    continue
                out.append(
                    Transition(
                        t.probability * keep,
                        t.successor,
                        t.reward_attacker,
                        t.reward_defender,
                        t.progress,
                    )
                )
                out.append(
                    Transition(
                        t.probability * (1.0 - keep),
                        n,
                        t.reward_attacker,
                        t.reward_defender,
                        t.progress,
                    )
                )
            out_rows.append(out)
        transitions.append(out_rows)
    transitions.append([[Transition(1.0, n, 0.0, 0.0, 0.0)]])
    meta = dict(m.meta)
    meta["horizon"] = horizon
    return ExplicitMdp(
        m.states + [TERMINAL_KEY],
        list(m.start),
        m.actions + [[CONTINUE]],
        transitions,
        meta,
        terminal=n,
    )


@dataclass
class _Flat:
    """Transition table flattened for vectorized sweeps."""

    n_states: int
    n_pairs: int
    seg: np.ndarray  # first (state, action) pair of each state, len n_states + 1
    pair_state: np.ndarray
    pair_action: np.ndarray  # action index within the state's action list
    t_pair: np.ndarray
    t_succ: np.ndarray
    t_prob: np.ndarray
    t_ra: np.ndarray
    t_rd: np.ndarray
    t_progress: np.ndarray


def _flatten(m: ExplicitMdp) -> _Flat:
    counts = [len(a) for a in m.actions]
    seg = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=seg[1:])
    pair_state = np.repeat(np.arange(len(counts), dtype=np.int64), counts)
    pair_action = np.concatenate([np.arange(c, dtype=np.int64) for c in counts])
    t_pair, t_succ, t_prob, t_ra, t_rd, t_pg = [], [], [], [], [], []
    pair = 0
    for rows in m.transitions:
        for row in rows:
            for t in row:
                t_pair.append(pair)
                t_succ.append(t.successor)
                t_prob.append(t.probability)
                t_ra.append(t.reward_attacker)
                t_rd.append(t.reward_defender)
                t_pg.append(t.progress)
            pair += 1
    return _Flat(
        len(counts),
        pair,
        seg,
        pair_state,
        pair_action,
        np.asarray(t_pair, dtype=np.int64),
        np.asarray(t_succ, dtype=np.int64),
        np.asarray(t_prob, dtype=np.float64),
        np.asarray(t_ra, dtype=np.float64),
        np.asarray(t_rd, dtype=np.float64),
        np.asarray(t_pg, dtype=np.float64),
    )


@dataclass
class Solution:
    policy: list[int]
    values: np.ndarray
    iterations: int
    residual: float


def value_iterate(
    m: ExplicitMdp, epsilon: float, max_iter: int = 1_000_000
) -> Solution:
    """Maximize expected total attacker reward until termination.

    Sweeps stop once the largest per-state value change drops below
    ``epsilon``.  Termination makes the tail of sweeps geometric with ratio
    about 1 - 1/horizon, so the remaining change in any value is about
    epsilon * horizon, i.e. epsilon on the per-progress revenue scale.
    Ties in the final greedy step resolve to the lowest action index.
    """
    if m.terminal is None:
        raise InvariantError("value iteration expects a terminated model")
    f = _flatten(m)
    base = f.t_prob * f.t_ra
    v = np.zeros(f.n_states)
    threshold = epsilon
    iterations = 0
    residual = np.inf
    while iterations < max_iter:
        q = np.bincount(f.t_pair, weights=base + f.t_prob * v[f.t_succ], minlength=f.n_pairs)
        v_new = np.maximum.reduceat(q, f.seg[:-1])
        iterations += 1
        residual = float(np.max(np.abs(v_new - v)))
        v = v_new
        if residual < threshold:
            break
    else:
        raise InvariantError(f"value iteration did not settle in {max_iter} sweeps")
    q = np.bincount(f.t_pair, weights=base + f.t_prob * v[f.t_succ], minlength=f.n_pairs)
    v_ext = np.maximum.reduceat(q, f.seg[:-1])
    best = np.flatnonzero(q == v_ext[f.pair_state])
    first = np.full(f.n_states, f.n_pairs, dtype=np.int64)
    np.minimum.at(first, f.pair_state[best], best)
    # every state has at least one action attaining its own maximum
    policy = (first - f.seg[:-1]).tolist()
    return Solution(policy, v, iterations, residual)


def honest_policy(m: ExplicitMdp) -> list[int]:
    """Index of the compliant action in every state.

    Generic model: release the oldest withheld block if any, else take the
    oldest ignored block into account, else continue.  Traditional model:
    adopt when behind, override when ahead, else wait.
    """
    if m.meta.get("model") == "traditional":
        from .traditional import ChainState, honest_chain_action

        policy = []
        for key, acts in zip(m.states, m.actions):
            if key == TERMINAL_KEY:
                policy.append(0)
                continue
            want = honest_chain_action(ChainState.from_key(key))
            policy.append(acts.index(want))
        return policy
    policy = []
    for acts in m.actions:
        pick = len(acts) - 1
        for i, a in enumerate(acts):
            if a.kind in (ActionKind.RELEASE, ActionKind.CONSIDER):
                pick = i
                break
        policy.append(pick)
    return policy


@dataclass
class RevenueReport:
    """Steady-state rates of the chain induced by a fixed policy."""

    revenue: float  # attacker share of settled rewards per progress unit
    attacker_rate: float
    defender_rate: float
    progress_rate: float
    iterations: int
    residual: float


def evaluate_policy(
    m: ExplicitMdp,
    policy: list[int],
    tol: float = 1e-10,
    max_iter: int = 2_000_000,
) -> RevenueReport:
    """Exact long-run attacker revenue of ``policy`` on the source model.

    Computes the stationary distribution by damped power iteration (the
    half-lazy chain has the same stationary law but cannot be periodic) and
    divides the stationary attacker reward rate by the progress rate.
    """
    if m.terminal is not None:
        raise InvariantError("evaluate_policy expects the untransformed model")
    n = len(m.states)
    src, succ, prob = [], [], []
    era = np.zeros(n)
    erd = np.zeros(n)
    epg = np.zeros(n)
    for s, (rows, a) in enumerate(zip(m.transitions, policy)):
        for t in rows[a]:
            src.append(s)
            succ.append(t.successor)
            prob.append(t.probability)
            era[s] += t.probability * t.reward_attacker
            erd[s] += t.probability * t.reward_defender
            epg[s] += t.probability * t.progress
    src = np.asarray(src, dtype=np.int64)
    succ = np.asarray(succ, dtype=np.int64)
    prob = np.asarray(prob, dtype=np.float64)

    x = np.zeros(n)
    for i, p in m.start:
        x[i] += p
    restart = 1e-12
    uniform = np.full(n, 1.0 / n)
    iterations = 0
    residual = np.inf
    while iterations < max_iter:
        step = np.bincount(succ, weights=x[src] * prob, minlength=n)
        iterations += 1
        residual = float(np.max(np.abs(step - x)))
        x = 0.5 * (x + step)
        x = (1.0 - restart) * x + restart * uniform
        if residual < tol:
            break
    else:
        raise InvariantError(f"power iteration did not settle in {max_iter} steps")

    rate_a = float(x @ era)
    rate_d = float(x @ erd)
    rate_p = float(x @ epg)
    if rate_p < 1e-12:
        raise DegeneratePolicyError(
            "policy makes no progress in steady state; revenue undefined"
        )
    return RevenueReport(rate_a / rate_p, rate_a, rate_d, rate_p, iterations, residual)


def simulate_progress(
    m: ExplicitMdp, policy: list[int], episodes: int, seed: int = 0
) -> np.ndarray:
    """Total progress per episode on a terminated model, Monte Carlo.

    The progress carried by the terminating transition itself counts, so the
    sample mean estimates the transform horizon.
    """
    if m.terminal is None:
        raise InvariantError("simulation expects a terminated model")
    n = len(m.states)
    rows = [m.transitions[s][policy[s]] for s in range(n)]
    width = max(len(r) for r in rows)
    cum = np.ones((n, width))
    succ = np.zeros((n, width), dtype=np.int64)
    pg = np.zeros((n, width))
    for s, row in enumerate(rows):
        c = 0.0
        for j, t in enumerate(row):
            c += t.probability
            cum[s, j] = c
            succ[s, j] = t.successor
            pg[s, j] = t.progress
        cum[s, len(row) - 1] = 1.0 + 1e-9
        for j in range(len(row), width):
            cum[s, j] = 1.0 + 1e-9
            succ[s, j] = succ[s, len(row) - 1]
            pg[s, j] = pg[s, len(row) - 1]

    rng = np.random.default_rng(seed)
    starts = np.array([i for i, _ in m.start])
    weights = np.array([p for _, p in m.start])
    state = rng.choice(starts, size=episodes, p=weights / weights.sum())
    total = np.zeros(episodes)
    while True:
        idx = np.flatnonzero(state != m.terminal)
        if idx.size == 0:
            return total
        cur = state[idx]
        u = rng.random(idx.size)
        col = (cum[cur] < u[:, None]).sum(axis=1)
        total[idx] += pg[cur, col]
        state[idx] = succ[cur, col]
