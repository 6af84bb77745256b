"""Command-line front end: sweeps to CSV plus state-level diagnostics.

Exit codes: 0 on success, 2 for configuration errors, 3 when exploration
exceeds the state budget.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .attack import AttackState, ModelParams, feasible_actions, transitions
from .canonical import dag_from_key
from .errors import BudgetExceededError, ConfigError, InvariantError
from .explore import DEFAULT_BUDGET
from .protocol import protocol_by_name, protocol_names
from .solver import pt_transform, value_iterate
from .sweep import SweepConfig, rows_to_csv, run_sweep

_DEFAULTS = {
    "protocol": "bitcoin",
    "model": "generic",
    "alpha": "0.25",
    "gamma": "0.5",
    "limit": 7,
    "horizon": 30.0,
    "epsilon": 0.01,
    "budget": DEFAULT_BUDGET,
    "threads": 1,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dagmdp",
        description="Derive and solve selfish-mining MDPs from DAG protocol specs.",
    )
    p.add_argument("--config", help="file with KEY=VALUE lines; flags take precedence")
    p.add_argument("--protocol", help=f"comma list of {', '.join(protocol_names())}")
    p.add_argument("--model", help="comma list of generic, traditional")
    p.add_argument("--alpha", help="comma list of attacker mining shares in [0,1]")
    p.add_argument("--gamma", help="comma list of communication advantages in [0,1]")
    p.add_argument("--limit", type=int, help="DAG height cap (default 7)")
    p.add_argument("--horizon", type=float, help="termination horizon (default 30)")
    p.add_argument("--epsilon", type=float, help="value-iteration tolerance (default 0.01)")
    p.add_argument("--budget", type=int, help="exploration state budget")
    p.add_argument("--out", help="write the sweep CSV here instead of stdout")
    p.add_argument("--cache-dir", help="directory for explored-model cache files")
    p.add_argument("--threads", type=int, help="worker threads for sweeps (default 1)")
    p.add_argument("--dump-state", metavar="KEY", help="print the DAG behind a hex state key")
    p.add_argument(
        "--dump-transitions",
        metavar="KEY",
        help="print actions and transitions of a hex state key",
    )
    p.add_argument(
        "--dump-policy",
        action="store_true",
        help="solve one point and print the optimal action per state",
    )
    return p


def _read_config(path: str) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected KEY=VALUE, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _DEFAULTS and key not in ("out", "cache_dir"):
            raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in ("limit", "budget", "threads"):
            return int(value)
        if key in ("horizon", "epsilon"):
            return float(value)
    except ValueError as e:
        raise ConfigError(f"bad value for {key}: {value!r}") from e
    return value


def _floats(key: str, text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(s) for s in text.split(","))
    except ValueError as e:
        raise ConfigError(f"bad value for {key}: {text!r}") from e
    if not vals:
        raise ConfigError(f"{key} must list at least one value")
    return vals


def _settings(args: argparse.Namespace) -> dict:
    cfg = _read_config(args.config) if args.config else {}
    merged = {}
    for key, default in {**_DEFAULTS, "out": None, "cache_dir": None}.items():
        value = getattr(args, key, None)
        if value is None:
            value = cfg.get(key, default)
        merged[key] = _coerce(key, value)
    return merged


def _decode_key(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError as e:
        raise ConfigError(f"state keys are hex strings, got {text!r}") from e


def _dump_state(key_hex: str) -> None:
    print(dag_from_key(_decode_key(key_hex)).dump())


def _dump_transitions(key_hex: str, s: dict) -> None:
    protocol = protocol_by_name(s["protocol"].split(",")[0])
    params = ModelParams(
        _floats("alpha", s["alpha"])[0], _floats("gamma", s["gamma"])[0], s["limit"]
    )
    dag = dag_from_key(_decode_key(key_hex))
    state = AttackState.from_dag(dag)
    for action in feasible_actions(state):
        print(action)
        for t in transitions(state, action, params, protocol):
            print(
                f"  p={t.probability:.10g} -> {t.successor.hex()}"
                f" attacker={t.reward_attacker:.10g} defender={t.reward_defender:.10g}"
                f" progress={t.progress:.10g}"
            )


def _dump_policy(s: dict) -> None:
    from .explore import explore as explore_generic
    from .traditional import explore_traditional

    model = s["model"].split(",")[0]
    protocol_name = s["protocol"].split(",")[0]
    params = ModelParams(
        _floats("alpha", s["alpha"])[0], _floats("gamma", s["gamma"])[0], s["limit"]
    )
    if model == "traditional":
        m = explore_traditional(params, s["budget"])
    elif model == "generic":
        m = explore_generic(protocol_by_name(protocol_name), params, s["budget"])
    else:
        raise ConfigError(f"unknown model {model!r}; known: generic, traditional")
    sol = value_iterate(pt_transform(m, s["horizon"]), s["epsilon"])
    print("index,key,action")
    for i in range(m.n_states):
        print(f"{i},{m.states[i].hex()},{m.actions[i][sol.policy[i]]}")


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        s = _settings(args)
        if args.dump_state:
            _dump_state(args.dump_state)
            return 0
        if args.dump_transitions:
            _dump_transitions(args.dump_transitions, s)
            return 0
        if args.dump_policy:
            _dump_policy(s)
            return 0
        cfg = SweepConfig(
            protocols=tuple(s["protocol"].split(",")),
            models=tuple(s["model"].split(",")),
            alphas=_floats("alpha", s["alpha"]),
            gammas=_floats("gamma", s["gamma"]),
            limit=s["limit"],
            horizon=s["horizon"],
            epsilon=s["epsilon"],
            budget=s["budget"],
            cache_dir=s["cache_dir"],
            threads=s["threads"],
        )
        text = rows_to_csv(run_sweep(cfg))
        if s["out"]:
            Path(s["out"]).write_text(text)
        else:
            sys.stdout.write(text)
    except (ConfigError, InvariantError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
