"""Sequential window planning: presolve, solve, repair, validate, stitch.

A plan is assembled window by window. Each window builds a fresh QUBO over
the robots active on the global clock, shrinks it by variable fixing, solves
it (or skips the solver when fixing decided everything), repairs the decoded
occupancy, and stitches the accepted sub-path onto the plan so global times
advance by exactly one per step. Failed windows are retried with fresh solver
seeds; the final retry widens the window once before giving up.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Cell, GridMap, bfs_distances, bfs_layers, manhattan
from .penalties import (
    GOAL_MODE_APPROX,
    GOAL_MODE_LATE,
    PenaltyWeights,
    RobotWindow,
    WindowSpec,
    build_window_model,
)
from .postprocess import (
    detect_invalid_move,
    find_vertex_conflicts,
    fix_one_hot_continuity,
    resolve_clash_wait,
)
from .preprocess import fix_logical, fix_numeric_diagonal, fold
from .qubo import decode
from .solvers import SolverConfig, solve

STATUS_REACHED = "reached_goal"
STATUS_EXHAUSTED = "max_windows_exhausted"
STATUS_INFEASIBLE = "infeasible"


class StitchError(RuntimeError):
    """A window path does not begin where the plan so far ends."""


@dataclass(frozen=True)
class WindowConfig:
    """Window length and retry budget of the sequential decomposition."""

    window_len: int = 6
    max_windows: int = 20
    max_retries_per_window: int = 5

    def __post_init__(self):
        if self.window_len < 2:
            raise ValueError("window_len must be >= 2")
        if self.max_windows < 1 or self.max_retries_per_window < 1:
            raise ValueError("window and retry budgets must be >= 1")


@dataclass(frozen=True)
class RobotSpec:
    """A robot's planning request: identity, endpoints, release time."""

    id: int
    start: Cell
    goal: Cell
    release: int = 0

    def __post_init__(self):
        if self.release < 0:
            raise ValueError("release time must be >= 0")


@dataclass
class PathDiagnosis:
    ok: bool
    kind: str | None = None
    step: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_path(grid: GridMap, path, goal: Cell | None = None,
                  allow_wait: bool = False) -> PathDiagnosis:
    """Soundness gate for a decoded path.

    Accepts a sequence of cells or of per-step cell sets. Checks one cell per
    step, obstacle freedom, step adjacency, and that the goal is not claimed
    before the L1 lower bound from the path's first cell allows.
    """
    cells: list[Cell] = []
    for t, entry in enumerate(path):
        if isinstance(entry, (set, frozenset)):
            if len(entry) != 1:
                return PathDiagnosis(False, "one_hot", t)
            entry = next(iter(entry))
        cells.append(entry)
    if not cells:
        return PathDiagnosis(False, "empty", 0)
    for t, c in enumerate(cells):
        if not grid.is_free(c):
            return PathDiagnosis(False, "obstacle", t)
    for t in range(1, len(cells)):
        prev, cur = cells[t - 1], cells[t]
        if cur == prev:
            if not allow_wait:
                return PathDiagnosis(False, "adjacency", t)
        elif cur not in grid.neighbors(prev):
            return PathDiagnosis(False, "adjacency", t)
    if goal is not None and goal in cells:
        first = cells.index(goal)
        if first < manhattan(cells[0], goal):
            return PathDiagnosis(False, "early_goal", first)
    return PathDiagnosis(True)


def stitch(steps, window_path, start_time: int = 0):
    """Append a window path, dropping the duplicated boundary cell.

    An empty plan is re-based at `start_time`; otherwise the window must
    begin on the plan's last cell, and global times continue by exactly one.
    """
    window_path = list(window_path)
    if not steps:
        return [(start_time + k, c) for k, c in enumerate(window_path)]
    if not window_path:
        return list(steps)
    if window_path[0] != steps[-1][1]:
        raise StitchError(
            f"window starts at {window_path[0]} but plan ends at {steps[-1][1]}"
        )
    base = steps[-1][0]
    return list(steps) + [(base + k, c) for k, c in enumerate(window_path[1:], 1)]


@dataclass
class WindowRecord:
    """Joint per-window diagnostics shared by every robot active in it."""

    index: int
    global_start: int
    horizon: int
    original: int
    reduced: int
    reduction_pct: float
    solved_by_preprocess: bool
    numeric_fixed: int
    retries: int
    escalated: bool
    backend: str
    best_energy: float | None
    norm_scale: float | None
    modes: dict[int, str]
    repairs: list[str] = field(default_factory=list)
    histogram: list[tuple[float, int]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "global_start": self.global_start,
            "horizon": self.horizon,
            "original": self.original,
            "reduced": self.reduced,
            "reduction_pct": round(self.reduction_pct, 4),
            "solved_by_preprocess": self.solved_by_preprocess,
            "numeric_fixed": self.numeric_fixed,
            "retries": self.retries,
            "escalated": self.escalated,
            "backend": self.backend,
            "best_energy": self.best_energy,
            "norm_scale": self.norm_scale,
            "histogram": [[e, n] for e, n in self.histogram],
            "modes": {str(k): v for k, v in sorted(self.modes.items())},
            "repairs": list(self.repairs),
        }


@dataclass
class Plan:
    """One robot's timestamped route plus everything learned producing it."""

    robot: int
    steps: list[tuple[int, Cell]]
    status: str
    window_log: list[WindowRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def moves(self) -> int:
        return max(0, len(self.steps) - 1)

    @property
    def cells(self) -> list[Cell]:
        return [c for _, c in self.steps]

    def to_json(self) -> dict:
        return {
            "robot": self.robot,
            "status": self.status,
            "moves": self.moves,
            "path": [[t, c[0], c[1]] for t, c in self.steps],
            "windows": [w.index for w in self.window_log],
            "notes": list(self.notes),
        }


@dataclass
class PlanningResult:
    """Plans for every robot plus run-level window and clash diagnostics."""

    plans: list[Plan]
    windows: list[WindowRecord]
    clash_events: list[str] = field(default_factory=list)
    unresolved_conflicts: list = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return (
            all(p.status == STATUS_REACHED for p in self.plans)
            and not self.unresolved_conflicts
        )

    def preprocess_totals(self) -> dict:
        original = sum(w.original for w in self.windows)
        reduced = sum(w.reduced for w in self.windows)
        pct = 100.0 * (original - reduced) / original if original else 0.0
        return {
            "original": original,
            "reduced": reduced,
            "reduction_pct": round(pct, 4),
            "solved_by_preprocess": bool(self.windows)
            and all(w.solved_by_preprocess for w in self.windows),
        }

    def to_json(self) -> dict:
        return {
            "status": "ok" if self.succeeded else "failed",
            "robots": [p.to_json() for p in self.plans],
            "preprocess": self.preprocess_totals(),
            "windows": [w.as_dict() for w in self.windows],
            "clash_events": list(self.clash_events),
            "unresolved_conflicts": [
                [t, [c[0], c[1]], r1, r2] for t, c, r1, r2 in self.unresolved_conflicts
            ],
        }


class _Agent:
    __slots__ = ("spec", "current", "visited", "steps", "status", "done", "log")

    def __init__(self, spec: RobotSpec):
        self.spec = spec
        self.current = spec.start
        self.visited = {spec.start}
        self.steps: list[tuple[int, Cell]] = []
        self.status: str | None = None
        self.done = False
        self.log: list[WindowRecord] = []

    def finish(self, status: str):
        self.status = status
        self.done = True


def _derive_seed(base: int, *parts: int) -> int:
    entropy = (base & 0xFFFFFFFFFFFFFFFF,) + tuple(p & 0xFFFFFFFF for p in parts)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _window_layers(grid: GridMap, agent: _Agent, horizon: int):
    """Reachability basis for one robot's window, with history fallback.

    Cells visited in earlier windows are excluded from the search first; when
    that walls off the goal or strands the robot short of the horizon, the
    exclusion is dropped so the softened revisit penalties take over instead.
    Returns (excluded cells, goal reachable flag), or None when the robot has
    nowhere to move at all.
    """
    goal = agent.spec.goal
    excluded = frozenset(agent.visited) - {agent.current}
    table = bfs_layers(grid, agent.current, horizon, exclude_visited=excluded)
    if table.contains(goal):
        return excluded, True
    fallback = bfs_layers(grid, agent.current, horizon)
    if fallback.contains(goal):
        return frozenset(), True
    if table.max_depth() < horizon and fallback.max_depth() > table.max_depth():
        table = fallback
        excluded = frozenset()
    if table.max_depth() == 0:
        return None
    return excluded, False


def _attempt_window(grid, agents, weights, solver_cfg, horizon, global_start,
                    seed, multi):
    """Build, presolve, solve, and repair one window.

    Returns (outcomes, stats) where outcomes is a per-agent list of
    (path, reached_goal), or None when the attempt failed and the caller
    should retry. stats carries the window diagnostics either way.
    """
    records = []
    modes = {}
    stats: dict = {"modes": modes, "repairs": [], "backend": "presolve",
                   "best_energy": None, "norm_scale": None}
    for agent in agents:
        layers = _window_layers(grid, agent, horizon)
        if layers is None:
            stats["failure"] = f"robot {agent.spec.id} cannot move"
            stats["deterministic"] = True
            return None, stats
        excluded, goal_reachable = layers
        if manhattan(agent.current, agent.spec.goal) < horizon and goal_reachable:
            mode = GOAL_MODE_LATE
        else:
            mode = GOAL_MODE_APPROX
        modes[agent.spec.id] = mode
        records.append(RobotWindow(
            start=agent.current,
            goal=agent.spec.goal,
            horizon=horizon,
            goal_mode=mode,
            visited=frozenset(agent.visited),
            excluded=excluded,
            release=global_start,
        ))
    spec = WindowSpec(grid, tuple(records), weights)
    report, admissible = fix_logical(spec)
    model = build_window_model(spec, admissible, allow_wait=multi)
    folded = fold(model, report)
    folded = fix_numeric_diagonal(folded, report)

    stats.update(
        original=report.original_count,
        reduced=report.reduced_count,
        reduction_pct=report.reduction_pct,
        solved_by_preprocess=report.solved_by_preprocess,
        numeric_fixed=report.numeric_fixed,
    )
    if report.solved_by_preprocess:
        ones = set(folded.fixed_one)
        stats["deterministic"] = True
    else:
        scale = weights.pick_scale(folded.model.num_vars)
        cfg = replace(solver_cfg, seed=seed)
        sampleset = solve(folded.model.normalized(scale), cfg)
        ones = folded.expand(sampleset.best.bits)
        stats.update(backend=cfg.backend, best_energy=sampleset.best.energy,
                     norm_scale=scale,
                     histogram=[(s.energy, s.occurrences)
                                for s in sampleset.samples[:8]])

    occupancy = decode(ones, spec.dims, len(records))
    outcomes = []
    for r, agent in enumerate(agents):
        per_step = [occupancy[r].get(t, set()) for t in range(horizon + 1)]
        repair = fix_one_hot_continuity(per_step, agent.current, grid,
                                        allow_wait=multi)
        if repair.dropped:
            stats["repairs"].append(
                f"robot {agent.spec.id}: dropped {repair.dropped} extra cell(s)"
            )
        goal = agent.spec.goal
        reached = False
        if goal in repair.path:
            path = repair.path[: repair.path.index(goal) + 1]
            reached = True
        elif repair.complete and modes[agent.spec.id] == GOAL_MODE_APPROX:
            path = repair.path
        elif (multi and repair.path and repair.reason == "empty_step"
              and modes[agent.spec.id] == GOAL_MODE_APPROX):
            # Trapped short of the horizon (another robot blocks the way):
            # hold position for the remaining steps and try again next window.
            path = repair.path + [repair.path[-1]] * (horizon + 1 - len(repair.path))
            stats["repairs"].append(
                f"robot {agent.spec.id}: waits from t={repair.failed_at}"
            )
        else:
            stats["failure"] = f"robot {agent.spec.id}: {repair.reason or 'goal_missed'}"
            return None, stats
        bad = detect_invalid_move(path, grid, allow_wait=multi)
        if bad is not None:
            stats["failure"] = f"robot {agent.spec.id}: {bad[1]} at t={bad[0]}"
            return None, stats
        if len(path) < 2 and not reached and not multi:
            stats["failure"] = f"robot {agent.spec.id}: no progress"
            return None, stats
        outcomes.append((path, reached))
    return outcomes, stats


def plan_paths(grid: GridMap, robots, weights: PenaltyWeights | None = None,
               window_cfg: WindowConfig | None = None,
               solver_cfg: SolverConfig | None = None,
               map_hook=None) -> PlanningResult:
    """Plan every robot on a shared global clock.

    Windows advance in lockstep; all robots active in a window share one
    QUBO with vertex-collision coupling. Robots that reach their goals park
    there and become static obstacles for later windows; robots released
    mid-window join at the next window boundary, waiting on their start
    cell. `map_hook(window_index, grid) -> GridMap | None` may swap the map
    between windows for dynamic scenes.
    """
    robots = list(robots)
    if len({r.id for r in robots}) != len(robots):
        raise ValueError("robot ids must be unique")
    weights = weights or PenaltyWeights()
    wcfg = window_cfg or WindowConfig()
    scfg = solver_cfg or SolverConfig()
    multi = len(robots) > 1
    agents = [_Agent(r) for r in robots]

    for agent in agents:
        if agent.spec.start == agent.spec.goal:
            agent.steps = [(agent.spec.release, agent.spec.start)]
            agent.finish(STATUS_REACHED)
        elif agent.spec.goal not in bfs_distances(grid, agent.spec.start):
            agent.finish(STATUS_INFEASIBLE)

    windows: list[WindowRecord] = []
    current_grid = grid
    pending = [a for a in agents if not a.done]
    clock = min((a.spec.release for a in pending), default=0)
    window_index = 0

    while window_index < wcfg.max_windows:
        pending = [a for a in agents if not a.done]
        if not pending:
            break
        active = [a for a in pending if a.spec.release <= clock]
        if not active:
            clock = min(a.spec.release for a in pending)
            continue
        if map_hook is not None:
            swapped = map_hook(window_index, current_grid)
            if swapped is not None:
                current_grid = swapped
        for agent in active:
            if not agent.steps:
                agent.steps = [
                    (t, agent.spec.start)
                    for t in range(agent.spec.release, clock + 1)
                ]

        blocked = set()
        for agent in agents:
            if agent.done and agent.status == STATUS_REACHED and agent.steps:
                blocked.add(agent.steps[-1][1])
            elif agent.done and agent.status == STATUS_EXHAUSTED:
                blocked.add(agent.current)
            elif not agent.done and clock < agent.spec.release < clock + wcfg.window_len:
                blocked.add(agent.spec.start)
        blocked -= {a.current for a in active}
        eff_grid = current_grid.with_obstacles(blocked)

        stuck = [a for a in active if not eff_grid.is_free(a.current)]
        if stuck:
            for agent in stuck:
                agent.finish(STATUS_EXHAUSTED)
            continue

        outcomes = None
        stats: dict = {}
        horizon = wcfg.window_len
        escalated = False
        attempts = 0
        for attempt in range(wcfg.max_retries_per_window):
            if attempt > 0 and attempt == wcfg.max_retries_per_window - 1:
                # Last chance: widen the window once before giving up.
                horizon = 2 * wcfg.window_len
                escalated = True
            attempts = attempt + 1
            seed = _derive_seed(scfg.seed, window_index, attempt, int(escalated))
            outcomes, stats = _attempt_window(
                eff_grid, active, weights, scfg, horizon, clock, seed, multi)
            if outcomes is not None:
                break
            if stats.get("deterministic") and not escalated:
                # Retrying an identical deterministic window cannot help.
                horizon = 2 * wcfg.window_len
                escalated = True

        record = WindowRecord(
            index=window_index,
            global_start=clock,
            horizon=horizon,
            original=stats.get("original", 0),
            reduced=stats.get("reduced", 0),
            reduction_pct=stats.get("reduction_pct", 0.0),
            solved_by_preprocess=stats.get("solved_by_preprocess", False),
            numeric_fixed=stats.get("numeric_fixed", 0),
            retries=attempts - 1,
            escalated=escalated,
            backend=stats.get("backend", "presolve"),
            best_energy=stats.get("best_energy"),
            norm_scale=stats.get("norm_scale"),
            modes=stats.get("modes", {}),
            repairs=stats.get("repairs", []),
            histogram=stats.get("histogram", []),
        )
        if "failure" in stats:
            record.repairs.append(f"window abandoned: {stats['failure']}")
        windows.append(record)

        if outcomes is None:
            for agent in active:
                agent.log.append(record)
                agent.finish(STATUS_EXHAUSTED)
            break

        for agent, (path, reached) in zip(active, outcomes):
            agent.log.append(record)
            agent.steps = stitch(agent.steps, path, start_time=clock)
            agent.visited |= set(path)
            agent.current = path[-1]
            if reached:
                agent.finish(STATUS_REACHED)
        clock += horizon
        window_index += 1

    for agent in agents:
        if not agent.done:
            agent.finish(STATUS_EXHAUSTED)

    plans = [
        Plan(a.spec.id, a.steps, a.status or STATUS_EXHAUSTED, a.log)
        for a in agents
    ]

    clash_events: list[str] = []
    unresolved: list = []
    if multi:
        reached = [p for p in plans if p.status == STATUS_REACHED and p.steps]
        lists = [p.steps for p in reached]
        if len(lists) >= 2 and find_vertex_conflicts(lists):
            lists, clash_events, unresolved = resolve_clash_wait(lists, grid)
            for p, new_steps in zip(reached, lists):
                p.steps = new_steps
        for conflict in unresolved:
            plan = reached[conflict[3]]
            if plan.status == STATUS_REACHED:
                plan.status = STATUS_EXHAUSTED
                plan.notes.append(f"unresolved vertex conflict at t={conflict[0]}")

    if map_hook is None:
        by_id = {r.id: r for r in robots}
        for plan in plans:
            if plan.status != STATUS_REACHED:
                continue
            diagnosis = validate_path(grid, plan.cells,
                                      goal=by_id[plan.robot].goal,
                                      allow_wait=multi)
            if not diagnosis:
                plan.status = STATUS_EXHAUSTED
                plan.notes.append(
                    f"validation failed: {diagnosis.kind} at step {diagnosis.step}"
                )

    return PlanningResult(plans, windows, clash_events, unresolved)


def plan_single(grid: GridMap, start: Cell, goal: Cell,
                weights: PenaltyWeights | None = None,
                window_cfg: WindowConfig | None = None,
                solver_cfg: SolverConfig | None = None,
                map_hook=None) -> Plan:
    """Plan one robot: the degenerate single-agent case of `plan_paths`."""
    result = plan_paths(
        grid, [RobotSpec(0, start, goal)],
        weights=weights, window_cfg=window_cfg, solver_cfg=solver_cfg,
        map_hook=map_hook,
    )
    return result.plans[0]
