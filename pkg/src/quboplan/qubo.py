"""Sparse upper-triangular QUBO container and the grid variable encoding."""

import warnings
from collections.abc import Collection

from .grid import Cell

Dims = tuple[int, int, int]  # (rows, cols, horizon): time steps run 0..horizon


def block_size(dims: Dims) -> int:
    """Variables one robot occupies: rows * cols * (horizon + 1)."""
    rows, cols, horizon = dims
    return rows * cols * (horizon + 1)


def var_index(dims: Dims, robot: int, t: int, c: Cell) -> int:
    """Linear index of the binary variable "robot occupies cell c at step t".

    Cells are enumerated row-major, time steps are grouped consecutively, and
    each robot owns one contiguous block. The mapping is a bijection over its
    domain.
    """
    rows, cols, horizon = dims
    if robot < 0:
        raise ValueError(f"robot index {robot} out of range")
    if not 0 <= t <= horizon:
        raise ValueError(f"time step {t} outside 0..{horizon}")
    i, j = c
    if not (0 <= i < rows and 0 <= j < cols):
        raise ValueError(f"cell {c} outside {rows}x{cols} grid")
    return i * cols + j + rows * cols * t + robot * block_size(dims)


def decode(ones: Collection[int], dims: Dims, num_robots: int) -> list[dict[int, set[Cell]]]:
    """Inverse of `var_index` applied to every set bit.

    Returns one time-to-cells map per robot. Empty sets at a step signal a
    one-hot violation that post-processing deals with downstream.
    """
    rows, cols, horizon = dims
    block = block_size(dims)
    per_cell = rows * cols
    out: list[dict[int, set[Cell]]] = [{} for _ in range(num_robots)]
    for n in ones:
        if not 0 <= n < block * num_robots:
            raise ValueError(f"variable index {n} out of range")
        robot, rem = divmod(n, block)
        t, lin = divmod(rem, per_cell)
        i, j = divmod(lin, cols)
        out[robot].setdefault(t, set()).add((i, j))
    return out


class QuboModel:
    """Quadratic binary objective stored as an upper-triangular coefficient map.

    Diagonal keys (a, a) hold linear terms; off-diagonal keys are kept with
    a < b. Coefficients that cancel to exactly zero are dropped, so the map
    never stores explicit zeros. `constant` carries the assignment-independent
    offset picked up by squared penalty expansions.
    """

    __slots__ = ("num_vars", "constant", "coeffs")

    def __init__(self, num_vars: int, constant: float = 0.0):
        if num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        self.num_vars = num_vars
        self.constant = float(constant)
        self.coeffs: dict[tuple[int, int], float] = {}

    def add(self, a: int, b: int, w: float) -> "QuboModel":
        """Accumulate weight w onto the canonical (min, max) key."""
        if not (0 <= a < self.num_vars and 0 <= b < self.num_vars):
            raise ValueError(f"index pair ({a}, {b}) outside 0..{self.num_vars - 1}")
        key = (a, b) if a <= b else (b, a)
        value = self.coeffs.get(key, 0.0) + w
        if value == 0.0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = value
        return self

    def get(self, a: int, b: int) -> float:
        key = (a, b) if a <= b else (b, a)
        return self.coeffs.get(key, 0.0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def copy(self) -> "QuboModel":
        dup = QuboModel(self.num_vars, self.constant)
        dup.coeffs = dict(self.coeffs)
        return dup

    def energy(self, ones: Collection[int]) -> float:
        """Objective value for the assignment whose set bits are `ones`."""
        active = ones if isinstance(ones, (set, frozenset)) else set(ones)
        for n in active:
            if not 0 <= n < self.num_vars:
                raise ValueError(f"variable index {n} out of range")
        total = self.constant
        for (a, b), w in self.coeffs.items():
            if a in active and (a == b or b in active):
                total += w
        return total

    def max_abs_coefficient(self) -> float:
        return max((abs(w) for w in self.coeffs.values()), default=0.0)

    def normalized(self, scale: float) -> "QuboModel":
        """Rescale so the largest absolute coefficient equals `scale` exactly.

        The constant is scaled by the same factor. Positive rescaling never
        changes which assignments minimize the objective. An all-zero model is
        returned unchanged with a warning.
        """
        if scale <= 0:
            raise ValueError("normalization scale must be positive")
        peak = self.max_abs_coefficient()
        if peak == 0.0:
            warnings.warn("normalizing a model with no nonzero coefficients", stacklevel=2)
            return self.copy()
        factor = scale / peak
        dup = QuboModel(self.num_vars, self.constant * factor)
        for key, w in self.coeffs.items():
            dup.coeffs[key] = w * factor
        return dup

    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-variable incident off-diagonal terms, for incremental solvers."""
        inc: list[list[tuple[int, float]]] = [[] for _ in range(self.num_vars)]
        for (a, b), w in self.coeffs.items():
            if a != b:
                inc[a].append((b, w))
                inc[b].append((a, w))
        for row in inc:
            row.sort()
        return inc

    def to_text(self) -> str:
        """Plain-text triple list: header "num_vars constant", then "a b w" lines."""
        lines = [f"{self.num_vars} {self.constant!r}"]
        for (a, b), w in sorted(self.coeffs.items()):
            lines.append(f"{a} {b} {w!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "QuboModel":
        rows = [line for line in text.splitlines() if line.strip()]
        if not rows:
            raise ValueError("empty model text")
        head = rows[0].split()
        if len(head) != 2:
            raise ValueError(f"bad header line: {rows[0]!r}")
        model = cls(int(head[0]), float(head[1]))
        for line in rows[1:]:
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"bad coefficient line: {line!r}")
            model.add(int(parts[0]), int(parts[1]), float(parts[2]))
        return model

    def __repr__(self) -> str:
        return (
            f"QuboModel(num_vars={self.num_vars}, nnz={len(self.coeffs)}, "
            f"constant={self.constant})"
        )
