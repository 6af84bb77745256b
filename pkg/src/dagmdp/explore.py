"""Breadth-first state-space exploration into an explicit MDP.

Exploration happens once per (model, limit, boundary class of alpha/gamma)
with symbolic probability monomials; numeric MDPs for concrete parameter
values are instantiated from the symbolic result.  State indices depend only
on BFS layer and key order, never on timing or worker count.
"""

from __future__ import annotations

import json
import pickle
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import attack
from .attack import Action, ActionKind, ModelParams, Transition, Weight, _cls
from .errors import BudgetExceededError, InvariantError
from .protocol import ProtocolSpec

DEFAULT_BUDGET = 1_000_000

_CACHE_MAGIC = b"DAGMDP01"


@dataclass
class SymbolicMdp:
    """Exploration result with probabilities kept as monomials."""

    states: list[bytes]
    start: list[tuple[Weight, int]]
    actions: list[list]
    transitions: list[list[list[tuple[Weight, int, float, float, float]]]]
    meta: dict


@dataclass
class ExplicitMdp:
    """Finite MDP with numeric probabilities and dense state indices."""

    states: list[bytes]
    start: list[tuple[int, float]]
    actions: list[list]
    transitions: list[list[list[Transition]]]
    meta: dict
    terminal: int | None = None
    _index: dict | None = field(default=None, repr=False)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def state_index(self, key: bytes) -> int:
        if self._index is None:
            self._index = {k: i for i, k in enumerate(self.states)}
        return self._index[key]


class GenericModel:
    """Adapter exposing the attack process to the explorer."""

    def __init__(
        self,
        protocol: ProtocolSpec,
        limit: int,
        aclass: int = 1,
        gclass: int = 1,
        canonical: bool = True,
    ):
        self.protocol = protocol
        self.limit = limit
        self.aclass = aclass
        self.gclass = gclass
        self.canonical = canonical
        self.meta = {
            "model": "generic",
            "protocol": protocol.name,
            "limit": limit,
            "aclass": aclass,
            "gclass": gclass,
            "canonical": canonical,
        }

    def symbolic_starts(self):
        return attack.symbolic_start_states(self.aclass, canonical=self.canonical)

    def actions(self, s):
        return attack.feasible_actions(s)

    def expand(self, s, action):
        return attack.outcomes(
            s,
            action,
            self.protocol,
            self.limit,
            self.aclass,
            self.gclass,
            canonical=self.canonical,
        )


def explore_symbolic(model, budget: int = DEFAULT_BUDGET) -> SymbolicMdp:
    """Deterministic BFS closure of the model's start states."""
    starts = model.symbolic_starts()
    objs: dict[int, object] = {}
    index: dict[bytes, int] = {}
    keys: list[bytes] = []
    fresh: dict[bytes, object] = {}
    for _, s in starts:
        fresh.setdefault(s.key, s)
    for k in sorted(fresh):
        index[k] = len(keys)
        keys.append(k)
        objs[index[k]] = fresh[k]
    start = [(w, index[s.key]) for w, s in starts]
    if len(keys) > budget:
        raise BudgetExceededError(budget)

    actions_out: list[list] = []
    raw_trans: list[list[list[tuple[Weight, bytes, float, float, float]]]] = []
    frontier = list(range(len(keys)))
    while frontier:
        fresh = {}
        for idx in frontier:
            s = objs.pop(idx)
            acts = model.actions(s)
            rows = []
            for a in acts:
                row = []
                for o in model.expand(s, a):
                    k = o.successor.key
                    if k not in index and k not in fresh:
                        fresh[k] = o.successor
                    row.append(
                        (o.weight, k, o.reward_attacker, o.reward_defender, o.progress)
                    )
                rows.append(row)
            actions_out.append(acts)
            raw_trans.append(rows)
        new_keys = sorted(fresh)
        if len(keys) + len(new_keys) > budget:
            raise BudgetExceededError(budget)
        lo = len(keys)
        for k in new_keys:
            index[k] = len(keys)
            keys.append(k)
            objs[index[k]] = fresh[k]
        frontier = list(range(lo, len(keys)))

    transitions = [
        [[(w, index[k], ra, rd, pg) for w, k, ra, rd, pg in row] for row in rows]
        for rows in raw_trans
    ]
    return SymbolicMdp(keys, start, actions_out, transitions, dict(model.meta))


def instantiate(sym: SymbolicMdp, alpha: float, gamma: float) -> ExplicitMdp:
    """Substitute numeric alpha/gamma and merge equal outcomes per action."""
    transitions = []
    for rows in sym.transitions:
        out_rows = []
        for row in rows:
            merged: dict[tuple, float] = {}
            order = []
            for w, j, ra, rd, pg in row:
                sig = (j, ra, rd, pg)
                if sig not in merged:
                    merged[sig] = 0.0
                    order.append(sig)
                merged[sig] += w.value(alpha, gamma)
            out_rows.append(
                [Transition(merged[sig], sig[0], sig[1], sig[2], sig[3]) for sig in order]
            )
        transitions.append(out_rows)
    start = [(i, w.value(alpha, gamma)) for w, i in sym.start]
    meta = dict(sym.meta)
    meta.update(alpha=alpha, gamma=gamma)
    meta.pop("aclass", None)
    meta.pop("gclass", None)
    return ExplicitMdp(sym.states, start, sym.actions, transitions, meta)


_SYMBOLIC_MEMO: dict[tuple, SymbolicMdp] = {}
_MEMO_LOCK = threading.Lock()


def clear_memo() -> None:
    with _MEMO_LOCK:
        _SYMBOLIC_MEMO.clear()


def memoized_symbolic(memo_key: tuple, factory) -> SymbolicMdp:
    """Explore once per key; safe to share across sweep workers."""
    with _MEMO_LOCK:
        sym = _SYMBOLIC_MEMO.get(memo_key)
        if sym is None:
            sym = factory()
            _SYMBOLIC_MEMO[memo_key] = sym
        return sym


def explore(
    protocol: ProtocolSpec,
    params: ModelParams,
    budget: int = DEFAULT_BUDGET,
    canonical: bool = True,
) -> ExplicitMdp:
    """Explore the generic attack model for concrete parameters."""
    aclass, gclass = _cls(params.alpha), _cls(params.gamma)
    memo_key = ("generic", protocol.cache_token(), params.limit, aclass, gclass, canonical)
    sym = memoized_symbolic(
        memo_key,
        lambda: explore_symbolic(
            GenericModel(protocol, params.limit, aclass, gclass, canonical), budget
        ),
    )
    return instantiate(sym, params.alpha, params.gamma)


def mdp_stats(m: ExplicitMdp) -> dict:
    """State/action/transition counts and the largest DAG in the space."""
    n_actions = sum(len(a) for a in m.actions)
    n_trans = sum(len(row) for rows in m.transitions for row in rows)
    stats = {
        "states": m.n_states,
        "actions": n_actions,
        "transitions": n_trans,
    }
    if m.meta.get("model") == "generic":
        stats["max_dag_blocks"] = max(k[0] for k in m.states)
    return stats


# -- binary cache -------------------------------------------------------------


def _encode_action(a) -> tuple:
    if isinstance(a, Action):
        return ("g", int(a.kind), a.index)
    return ("t", str(a))


def _decode_action(t: tuple):
    if t[0] == "g":
        return Action(ActionKind(t[1]), t[2])
    from .traditional import ChainAction

    return ChainAction(t[1])


def cache_path(cache_dir: str | Path, meta: dict) -> Path:
    name = (
        f"{meta['model']}-{meta['protocol']}-l{meta['limit']}"
        f"-a{meta['alpha']:.6g}-g{meta['gamma']:.6g}.mdp"
    )
    return Path(cache_dir) / name


def save_cached(path: str | Path, m: ExplicitMdp) -> None:
    body = (
        m.states,
        m.start,
        [[_encode_action(a) for a in acts] for acts in m.actions],
        [
            [[(t.probability, t.successor, t.reward_attacker, t.reward_defender, t.progress) for t in row] for row in rows]
            for rows in m.transitions
        ],
    )
    header = json.dumps(m.meta, sort_keys=True).encode()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_CACHE_MAGIC)
        f.write(len(header).to_bytes(4, "big"))
        f.write(header)
        f.write(pickle.dumps(body, protocol=4))


def load_cached(path: str | Path, expected_meta: dict) -> ExplicitMdp | None:
    """Return the cached MDP, or None if absent, stale, or mismatched."""
    path = Path(path)
    if not path.exists():
        return None
    try:
        with open(path, "rb") as f:
            if f.read(len(_CACHE_MAGIC)) != _CACHE_MAGIC:
                return None
            hlen = int.from_bytes(f.read(4), "big")
            meta = json.loads(f.read(hlen))
            if meta != expected_meta:
                return None
            states, start, acts, trans = pickle.load(f)
    except (OSError, ValueError, pickle.UnpicklingError, EOFError):
        return None
    return ExplicitMdp(
        states,
        start,
        [[_decode_action(t) for t in row] for row in acts],
        [[[Transition(*t) for t in row] for row in rows] for rows in trans],
        meta,
    )
