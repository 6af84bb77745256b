"""Selfish-mining MDPs derived automatically from DAG protocol specs."""

from .attack import (
    CONTINUE,
    Action,
    ActionKind,
    AttackState,
    ModelParams,
    Transition,
    feasible_actions,
    settle,
    start_states,
    transitions,
)
from .bitcoin import Bitcoin
from .blockdag import (
    BlockDag,
    DefenderView,
    IgnoreStatus,
    Miner,
    WithholdStatus,
)
from .canonical import canonical_key, canonical_order, dag_from_key
from .errors import (
    BudgetExceededError,
    ConfigError,
    DegeneratePolicyError,
    InvariantError,
)
from .ethereum import Ethereum, EthereumParams
from .explore import ExplicitMdp, explore, mdp_stats
from .protocol import (
    DagView,
    ProtocolSpec,
    RewardEntry,
    protocol_by_name,
    protocol_names,
    register_protocol,
)
from .solver import (
    RevenueReport,
    Solution,
    evaluate_policy,
    honest_policy,
    pt_transform,
    simulate_progress,
    value_iterate,
)
from .sweep import SweepConfig, run_sweep, solve_point, write_csv
from .traditional import ChainState, TraditionalModel, explore_traditional

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionKind",
    "AttackState",
    "Bitcoin",
    "BlockDag",
    "BudgetExceededError",
    "CONTINUE",
    "ChainState",
    "ConfigError",
    "DagView",
    "DefenderView",
    "DegeneratePolicyError",
    "Ethereum",
    "EthereumParams",
    "ExplicitMdp",
    "IgnoreStatus",
    "InvariantError",
    "Miner",
    "ModelParams",
    "ProtocolSpec",
    "RevenueReport",
    "RewardEntry",
    "Solution",
    "SweepConfig",
    "TraditionalModel",
    "Transition",
    "WithholdStatus",
    "canonical_key",
    "canonical_order",
    "dag_from_key",
    "evaluate_policy",
    "explore",
    "explore_traditional",
    "feasible_actions",
    "honest_policy",
    "mdp_stats",
    "protocol_by_name",
    "protocol_names",
    "pt_transform",
    "register_protocol",
    "run_sweep",
    "settle",
    "simulate_progress",
    "solve_point",
    "start_states",
    "transitions",
    "value_iterate",
    "write_csv",
]
