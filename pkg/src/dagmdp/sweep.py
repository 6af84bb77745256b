"""Parameter sweeps: solve a grid of (protocol, model, alpha, gamma) points.

Grid points are independent, so they can be solved by a thread pool; results
are emitted in grid order and the numeric pipeline is deterministic, so the
CSV content does not depend on the worker count (wall_time_ms aside).
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

from .attack import ModelParams
from .errors import ConfigError
from .explore import (
    DEFAULT_BUDGET,
    cache_path,
    explore as explore_generic,
    load_cached,
    save_cached,
)
from .protocol import protocol_by_name
from .solver import evaluate_policy, honest_policy, pt_transform, value_iterate
from .traditional import explore_traditional

CSV_COLUMNS = [
    "protocol",
    "model",
    "alpha",
    "gamma",
    "limit",
    "horizon",
    "epsilon",
    "revenue",
    "honest_revenue",
    "states",
    "iterations",
    "wall_time_ms",
]


@dataclass(frozen=True)
class SweepConfig:
    protocols: tuple[str, ...] = ("bitcoin",)
    models: tuple[str, ...] = ("generic",)
    alphas: tuple[float, ...] = (0.25,)
    gammas: tuple[float, ...] = (0.5,)
    limit: int = 7
    horizon: float = 30.0
    epsilon: float = 0.01
    budget: int = DEFAULT_BUDGET
    cache_dir: str | None = None
    threads: int = 1

    def points(self) -> list[tuple[str, str, float, float]]:
        return list(product(self.protocols, self.models, self.alphas, self.gammas))


def solve_point(
    protocol_name: str,
    model: str,
    alpha: float,
    gamma: float,
    limit: int,
    horizon: float,
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    cache_dir: str | None = None,
) -> dict:
    """Solve one grid point; returns a CSV-ready row dict."""
    t0 = time.perf_counter()
    params = ModelParams(alpha, gamma, limit)
    if model == "generic":
        protocol = protocol_by_name(protocol_name)
        expected_meta = {
            "model": "generic",
            "protocol": protocol.name,
            "limit": limit,
            "canonical": True,
            "alpha": alpha,
            "gamma": gamma,
        }
    elif model == "traditional":
        if protocol_name != "bitcoin":
            raise ConfigError(
                f"the traditional model is specific to bitcoin, got {protocol_name!r}"
            )
        expected_meta = {
            "model": "traditional",
            "protocol": "bitcoin",
            "limit": limit,
            "alpha": alpha,
            "gamma": gamma,
        }
    else:
        raise ConfigError(f"unknown model {model!r}; known: generic, traditional")

    m = None
    if cache_dir is not None:
        m = load_cached(cache_path(cache_dir, expected_meta), expected_meta)
    if m is None:
        if model == "generic":
            m = explore_generic(protocol, params, budget)
        else:
            m = explore_traditional(params, budget)
        if cache_dir is not None:
            save_cached(cache_path(cache_dir, expected_meta), m)

    pt = pt_transform(m, horizon)
    sol = value_iterate(pt, epsilon)
    optimal = evaluate_policy(m, sol.policy[: m.n_states])
    honest = evaluate_policy(m, honest_policy(m))
    wall_ms = int(round((time.perf_counter() - t0) * 1000))
    return {
        "protocol": protocol_name,
        "model": model,
        "alpha": alpha,
        "gamma": gamma,
        "limit": limit,
        "horizon": horizon,
        "epsilon": epsilon,
        "revenue": optimal.revenue,
        "honest_revenue": honest.revenue,
        "states": m.n_states,
        "iterations": sol.iterations,
        "wall_time_ms": wall_ms,
    }


def run_sweep(cfg: SweepConfig) -> list[dict]:
    """Solve every grid point; rows come back in grid order."""
    points = cfg.points()

    def work(pt):
        protocol, model, alpha, gamma = pt
        return solve_point(
            protocol,
            model,
            alpha,
            gamma,
            cfg.limit,
            cfg.horizon,
            cfg.epsilon,
            cfg.budget,
            cfg.cache_dir,
        )

    if cfg.threads <= 1:
        return [work(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(work, points))


def _fmt(column: str, value) -> str:
    if isinstance(value, float):
        if column in ("revenue", "honest_revenue"):
            return f"{value:.12g}"
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(c, row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows: list[dict], path: str | Path) -> None:
    Path(path).write_text(rows_to_csv(rows))
