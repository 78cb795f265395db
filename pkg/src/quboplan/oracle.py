"""Annealer-vs-exhaustive agreement checks on pipeline-generated instances.

Random small scenarios are pushed through logical fixing and folding exactly
as the planner would, and the annealer's best energy is compared against the
enumerated ground state on every instance small enough to enumerate.
"""

from dataclasses import replace

import numpy as np

from .grid import GridMap, bfs_distances, bfs_layers, manhattan
from .penalties import (
    GOAL_MODE_APPROX,
    GOAL_MODE_LATE,
    PenaltyWeights,
    RobotWindow,
    WindowSpec,
)
from .preprocess import preprocess_window
from .solvers import (
    EXHAUSTIVE_VAR_CAP,
    SolverConfig,
    solve_annealing,
    solve_exhaustive,
)


def window_spec_for(grid: GridMap, start, goal, horizon: int,
                    weights: PenaltyWeights | None = None,
                    visited=(), excluded=()) -> WindowSpec:
    """First-window spec with the same mode choice the planner makes."""
    weights = weights or PenaltyWeights()
    table = bfs_layers(grid, start, horizon, exclude_visited=excluded)
    if manhattan(start, goal) < horizon and table.contains(goal):
        mode = GOAL_MODE_LATE
    else:
        mode = GOAL_MODE_APPROX
    record = RobotWindow(start=start, goal=goal, horizon=horizon,
                         goal_mode=mode, visited=frozenset(visited),
                         excluded=frozenset(excluded))
    return WindowSpec(grid, (record,), weights)


def random_instances(samples: int, seed: int, max_free: int = 20):
    """Random solvable window models with at most `max_free` free variables."""
    rng = np.random.default_rng(np.random.SeedSequence((seed & 0xFFFFFFFFFFFFFFFF, 0xA11CE)))
    produced = 0
    while produced < samples:
        size = int(rng.integers(3, 5))
        cells = [(i, j) for i in range(size) for j in range(size)]
        obstacles = frozenset(
            c for c in cells if rng.random() < 0.15
        )
        free = [c for c in cells if c not in obstacles]
        if len(free) < 4:
            continue
        start, goal = (free[int(k)] for k in rng.choice(len(free), 2, replace=False))
        grid = GridMap(size, size, obstacles)
        if goal not in bfs_distances(grid, start):
            continue
        horizon = int(rng.integers(3, 6))
        spec = window_spec_for(grid, start, goal, horizon)
        folded, report, _ = preprocess_window(spec)
        n = folded.model.num_vars
        if n < 1 or n > min(max_free, EXHAUSTIVE_VAR_CAP):
            continue
        produced += 1
        yield spec, folded


def oracle_check(samples: int = 25, runs_per_sample: int = 4, seed: int = 7,
                 solver_cfg: SolverConfig | None = None) -> dict:
    """Fraction of annealer runs that hit the enumerated ground state."""
    base_cfg = solver_cfg or SolverConfig()
    total = 0
    agreed = 0
    details = []
    for spec, folded in random_instances(samples, seed):
        scale = spec.weights.pick_scale(folded.model.num_vars)
        model = folded.model.normalized(scale)
        ground = solve_exhaustive(model).best.energy
        hits = 0
        for run in range(runs_per_sample):
            sub = int(np.random.SeedSequence(
                (seed & 0xFFFFFFFFFFFFFFFF, total + run)).generate_state(1, np.uint64)[0])
            best = solve_annealing(model, replace(base_cfg, seed=sub)).best.energy
            if abs(best - ground) <= 1e-9:
                hits += 1
        total += runs_per_sample
        agreed += hits
        details.append({
            "free_vars": folded.model.num_vars,
            "ground_energy": ground,
            "hits": hits,
            "runs": runs_per_sample,
        })
    return {
        "samples": len(details),
        "runs": total,
        "agreed": agreed,
        "agreement": round(agreed / total, 4) if total else 0.0,
        "instances": details,
    }
