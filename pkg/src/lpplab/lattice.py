"""Lattice last-passage times T(n,k) by dynamic programming, with optimal-path
row profiles from bit-packed backpointers and a brute-force path enumerator
for small instances.

Conventions: columns i = 0..n, rows r = 1..k; a directed path steps right or
up from (0,1) to (n,k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import mpmath
import numpy as np

from . import kernels
from .weights import StreamKey, WeightSpec, sample_row

ENUMERATION_GUARD = 10**6
DEFAULT_PATH_BUDGET_BYTES = 512 * 1024 * 1024


class MemoryBudgetError(MemoryError):
    def __init__(self, required: int, budget: int):
        super().__init__(
            f"backpointer table needs {required} bytes, budget is {budget}"
        )
        self.required = required
        self.budget = budget


class GridWeights:
    """Materialized (k, n+1) weight grid; w[r-1, i] is the weight at (i, r)."""

    def __init__(self, grid):
        self.grid = np.ascontiguousarray(grid, dtype=float)
        if self.grid.ndim != 2:
            raise ValueError("weight grid must be 2-dimensional")

    def row(self, r: int) -> np.ndarray:
        return self.grid[r - 1]


class StreamedWeights:
    """Rows generated on the fly from (master_seed, replica, row) streams."""

    def __init__(self, spec: WeightSpec, key: StreamKey, n: int):
        self.spec = spec
        self.key = key
        self.n = n

    def row(self, r: int) -> np.ndarray:
        return sample_row(self.spec, self.key.with_row(r), self.n + 1)


@dataclass(frozen=True)
class LatticeInstance:
    n: int
    k: int
    weights: object

    def __post_init__(self):
        if self.n < 0 or self.k < 1:
            raise ValueError("need n >= 0 and k >= 1")

    @classmethod
    def from_grid(cls, grid) -> "LatticeInstance":
        g = GridWeights(grid)
        return cls(n=g.grid.shape[1] - 1, k=g.grid.shape[0], weights=g)

    @classmethod
    def from_stream(cls, spec: WeightSpec, key: StreamKey, n: int, k: int):
        return cls(n=n, k=k, weights=StreamedWeights(spec, key, n))

    def row(self, r: int) -> np.ndarray:
        return np.ascontiguousarray(self.weights.row(r), dtype=float)


@dataclass(frozen=True)
class PassageResult:
    value: float
    row_profile: np.ndarray | None = None


def passage_time(inst: LatticeInstance) -> float:
    """T(n,k) via T(i,r) = w + max(T(i-1,r), T(i,r-1)); O(n k) time, one
    rolling row of memory."""
    width = inst.n + 1
    t = np.empty(width)
    kernels.lpp_first_row(inst.row(1), t)
    for r in range(2, inst.k + 1):
        kernels.lpp_row_update(t.copy(), inst.row(r), t)
    return float(t[-1])


def path_table_bytes(n: int, k: int) -> int:
    return k * ((n + 1 + 7) // 8)


def passage_time_with_path(
    inst: LatticeInstance, memory_budget: int = DEFAULT_PATH_BUDGET_BYTES
) -> PassageResult:
    """Passage time plus the row profile v_i of the lowest maximizing path.

    Backpointers cost 1 bit per lattice cell; exact ties between the two
    predecessors resolve to the one below, so the reconstructed path is the
    lowest optimal path and v_i is its (minimal) row in column i.
    """
    need = path_table_bytes(inst.n, inst.k)
    if need > memory_budget:
        raise MemoryBudgetError(need, memory_budget)
    width = inst.n + 1
    row_bytes = (width + 7) // 8
    bits = np.zeros((inst.k, row_bytes), dtype=np.uint8)
    t = np.empty(width)
    kernels.lpp_first_row_path(inst.row(1), t, bits[0])
    for r in range(2, inst.k + 1):
        kernels.lpp_row_update_path(t.copy(), inst.row(r), t, bits[r - 1])
    profile = np.empty(width, dtype=np.int64)
    kernels.backtrack_profile(bits, inst.n, inst.k, profile)
    return PassageResult(value=float(t[-1]), row_profile=profile)


def path_points(profile: np.ndarray, k: int):
    """Lattice points of the path encoded by a row profile, in visit order."""
    n = len(profile) - 1
    pts = []
    for i in range(n + 1):
        top = profile[i + 1] if i < n else k
        for r in range(int(profile[i]), int(top) + 1):
            pts.append((i, r))
    return pts


def path_sum(inst: LatticeInstance, profile: np.ndarray) -> float:
    rows = {r: inst.row(r) for r in range(1, inst.k + 1)}
    acc = 0.0
    for i, r in path_points(profile, inst.k):
        acc += rows[r][i]
    return acc


def brute_force_passage_time(inst: LatticeInstance) -> float:
    """Direct maximum over all paths; oracle for the DP."""
    n, k = inst.n, inst.k
    if math.comb(n + k - 1, n) > ENUMERATION_GUARD:
        raise ValueError(
            f"{math.comb(n + k - 1, n)} paths exceed the enumeration guard"
        )
    rows = [inst.row(r) for r in range(1, k + 1)]
    best = -math.inf
    for ups in combinations_with_replacement(range(n + 1), k - 1):
        cols = (0,) + ups + (n,)
        acc = 0.0
        for r in range(1, k + 1):
            row = rows[r - 1]
            for i in range(cols[r - 1], cols[r] + 1):
                acc += row[i]
        if acc > best:
            best = acc
    return best


def midpoint_row(result: PassageResult, n: int) -> int:
    """v at column floor(n/2)."""
    if result.row_profile is None:
        raise ValueError("result carries no row profile")
    return int(result.row_profile[n // 2])


def floor_power(n: int, a: float) -> int:
    """floor(n**a) in extended precision with a half-ulp guard: a is a
    rounded double (e.g. 1/3), so values within the induced slop
    ~ x*ln(n)*eps of an integer snap to it rather than flooring one short."""
    with mpmath.workdps(50):
        x = mpmath.mpf(n) ** mpmath.mpf(a)
        r = mpmath.nint(x)
        tol = abs(x) * mpmath.log(n) * mpmath.mpf(2) ** -50
        if abs(x - r) <= tol:
            return int(r)
        return int(mpmath.floor(x))
