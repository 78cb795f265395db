"""Repairs that turn near-valid solver output into usable window paths.

Three stages, applied in order: continuity repair collapses steps where the
sampler kept several cells, invalid-move detection triggers a window restart,
and wait insertion clears vertex clashes between finished per-robot plans.
All transformations are pure; every function returns new data.
"""

from dataclasses import dataclass

from .grid import Cell, GridMap

Steps = list[tuple[int, Cell]]  # (global time, cell), times contiguous


@dataclass
class RepairOutcome:
    """Result of continuity repair: the kept prefix and why it stopped."""

    path: list[Cell]
    complete: bool
    reason: str | None = None
    failed_at: int | None = None
    dropped: int = 0


def fix_one_hot_continuity(occupancy, prev_cell: Cell, grid: GridMap,
                           allow_wait: bool = False) -> RepairOutcome:
    """Collapse multi-cell steps by keeping the one cell that stays connected.

    `occupancy` is one cell set per local step; `prev_cell` seeds continuity
    and must be the decoded cell at step 0. Singleton steps pass through
    untouched (invalid moves are a later check). The repair stops at the
    first empty step, or fails when several candidates or none maintain
    continuity.
    """
    kept: list[Cell] = []
    dropped = 0
    for t, cells in enumerate(occupancy):
        if not cells:
            return RepairOutcome(kept, False, "empty_step", t, dropped)
        if t == 0:
            if prev_cell not in cells:
                return RepairOutcome([], False, "start_mismatch", 0, dropped)
            dropped += len(cells) - 1
            kept.append(prev_cell)
        elif len(cells) == 1:
            kept.append(next(iter(cells)))
        else:
            candidates = sorted(cells & grid.neighbors(kept[-1], allow_wait=allow_wait))
            if len(candidates) != 1:
                reason = "ambiguous" if len(candidates) > 1 else "disconnected"
                return RepairOutcome(kept, False, reason, t, dropped)
            dropped += len(cells) - 1
            kept.append(candidates[0])
    return RepairOutcome(kept, True, None, None, dropped)


def detect_invalid_move(path, grid: GridMap, allow_wait: bool = False):
    """Earliest step breaking adjacency or stepping onto a blocked cell.

    Returns (step, kind) or None. The obstacle branch is unreachable while
    obstacles are pruned structurally, but stays as defense in depth.
    """
    for t, c in enumerate(path):
        if not grid.is_free(c):
            return (t, "obstacle")
        if t > 0:
            prev = path[t - 1]
            if c == prev:
                if not allow_wait:
                    return (t, "adjacency")
            elif c not in grid.neighbors(prev):
                return (t, "adjacency")
    return None


def occupied_at(steps: Steps, t: int) -> Cell | None:
    """Cell a robot holds at global time t; robots park on their last cell."""
    if not steps or t < steps[0][0]:
        return None
    if t >= steps[-1][0]:
        return steps[-1][1]
    return steps[t - steps[0][0]][1]


def find_vertex_conflicts(step_lists: list[Steps]):
    """All (t, cell, r1, r2) where two robots hold the same cell at once.

    Finished robots keep occupying their final cell, and robots are absent
    before their first timestamp. Sorted by time, then cell, then robots.
    """
    populated = [(r, s) for r, s in enumerate(step_lists) if s]
    if len(populated) < 2:
        return []
    lo = min(s[0][0] for _, s in populated)
    hi = max(s[-1][0] for _, s in populated)
    conflicts = []
    for t in range(lo, hi + 1):
        spots: dict[Cell, int] = {}
        for r, s in populated:
            c = occupied_at(s, t)
            if c is None:
                continue
            if c in spots:
                conflicts.append((t, c, spots[c], r))
            else:
                spots[c] = r
    conflicts.sort()
    return conflicts


def resolve_clash_wait(step_lists: list[Steps], grid: GridMap,
                       budget: int | None = None):
    """Clear vertex clashes by delaying the lower-priority robot.

    The robot with the higher index waits one extra step on the cell it holds
    just before the clash, and the scan repeats until no conflicts remain or
    the budget runs out. Cell sequences are never altered, only timing.
    Returns (adjusted step lists, event strings, unresolved conflicts).
    """
    lists = [list(s) for s in step_lists]
    if budget is None:
        budget = 2 * max(1, len(lists)) * (grid.rows + grid.cols)
    events: list[str] = []
    while budget > 0:
        conflicts = find_vertex_conflicts(lists)
        if not conflicts:
            return lists, events, []
        t, cell, _, victim = conflicts[0]
        steps = lists[victim]
        if t <= steps[0][0] or t >= steps[-1][0]:
            # Clash on the start cell or against a parked robot: waiting
            # cannot clear it.
            return lists, events, conflicts
        k = t - steps[0][0]
        hold = steps[k - 1][1]
        lists[victim] = (
            steps[:k]
            + [(t, hold)]
            + [(tt + 1, c) for tt, c in steps[k:]]
        )
        events.append(f"robot {victim} waits at {hold} before t={t} to avoid {cell}")
        budget -= 1
    return lists, events, find_vertex_conflicts(lists)
