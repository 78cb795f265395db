"""Grid path planning for one or more robots through sparse QUBO models."""

from .grid import (
    Cell,
    GridMap,
    ReachabilityTable,
    bfs_distances,
    bfs_layers,
    euclidean,
    manhattan,
    obstacle_potential,
)
from .qubo import QuboModel, block_size, decode, var_index
from .penalties import (
    GOAL_MODE_APPROX,
    GOAL_MODE_LATE,
    PenaltyWeights,
    RobotWindow,
    WindowSpec,
    build_window_model,
)
from .preprocess import (
    FixReport,
    FoldedModel,
    InfeasibleWindowError,
    fix_logical,
    fix_numeric_diagonal,
    fold,
    preprocess_window,
)
from .solvers import (
    BACKEND_ANNEALER,
    BACKEND_EXHAUSTIVE,
    Sample,
    SampleSet,
    SolverConfig,
    solve,
    solve_annealing,
    solve_exhaustive,
)
from .planner import (
    Plan,
    PlanningResult,
    RobotSpec,
    STATUS_EXHAUSTED,
    STATUS_INFEASIBLE,
    STATUS_REACHED,
    StitchError,
    WindowConfig,
    plan_paths,
    plan_single,
    stitch,
    validate_path,
)
from .postprocess import (
    detect_invalid_move,
    find_vertex_conflicts,
    fix_one_hot_continuity,
    resolve_clash_wait,
)
from .multi import GlobalClock, allocate_offsets, plan_multi, validate_robots
from .classical import astar, dijkstra, path_moves, prioritized_plan
from .scenario import ScenarioError, ScenarioSpec, load_scenario, parse_scenario, serialize_scenario
from .render import render_svg
from .bench import run_benchmark, run_pipeline

__version__ = "0.1.0"
