"""Multi-robot coordination on a global clock.

Robots are planned jointly: every window holds one QUBO containing all
currently active robots with vertex-collision coupling, so the variable
count grows linearly in the robot count while conflicts are resolved inside
the optimization rather than sequentially.
"""

from dataclasses import dataclass

from .grid import GridMap, manhattan
from .planner import (
    PenaltyWeights,
    PlanningResult,
    RobotSpec,
    SolverConfig,
    WindowConfig,
    plan_paths,
)
from .qubo import Dims, block_size

__all__ = [
    "GlobalClock",
    "RobotSpec",
    "allocate_offsets",
    "plan_multi",
    "validate_robots",
]


@dataclass(frozen=True)
class GlobalClock:
    """Shared timeline: time 0 is the first release, robots join at offsets."""

    horizon: int
    intervals: tuple[tuple[int, int], ...]  # per robot: (release, release + local horizon)

    @classmethod
    def from_robots(cls, robots, safety_factor: float = 2.0) -> "GlobalClock":
        """Generous per-robot horizons: L1 distance scaled by a safety factor.

        Overestimating costs nothing, since unused variable slots are never
        populated in the sparse model.
        """
        intervals = []
        for r in robots:
            span = max(1, int(manhattan(r.start, r.goal) * safety_factor))
            intervals.append((r.release, r.release + span))
        return cls(max(end for _, end in intervals), tuple(intervals))


def allocate_offsets(robots, dims: Dims) -> list[int]:
    """Base variable index of each robot's block: robot r owns one full
    rows*cols*(horizon+1) slice after the blocks of robots before it."""
    if not robots:
        raise ValueError("need at least one robot")
    block = block_size(dims)
    return [r * block for r in range(len(robots))]


def validate_robots(grid: GridMap, robots) -> None:
    """Reject robot sets that can never produce conflict-free plans."""
    robots = list(robots)
    ids = [r.id for r in robots]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate robot ids")
    for r in robots:
        if not grid.is_free(r.start):
            raise ValueError(f"robot {r.id}: start {r.start} is not a free cell")
        if not grid.is_free(r.goal):
            raise ValueError(f"robot {r.id}: goal {r.goal} is not a free cell")
    goals = [r.goal for r in robots]
    if len(set(goals)) != len(goals):
        raise ValueError("two robots share a goal cell; both could never park")
    seen: dict[tuple, int] = {}
    for r in robots:
        key = (r.start, r.release)
        if key in seen:
            raise ValueError(
                f"robots {seen[key]} and {r.id} share start {r.start} at release {r.release}"
            )
        seen[key] = r.id


def plan_multi(grid: GridMap, robots,
               weights: PenaltyWeights | None = None,
               window_cfg: WindowConfig | None = None,
               solver_cfg: SolverConfig | None = None,
               map_hook=None) -> PlanningResult:
    """Jointly plan a set of robots; one robot degenerates to single planning.

    Robots are prioritized by their order in `robots`: when residual clashes
    must be cleared by waiting, the later robot yields.
    """
    robots = sorted(robots, key=lambda r: r.id)
    validate_robots(grid, robots)
    return plan_paths(
        grid, robots,
        weights=weights, window_cfg=window_cfg, solver_cfg=solver_cfg,
        map_hook=map_hook,
    )
