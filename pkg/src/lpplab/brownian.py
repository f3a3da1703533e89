"""Brownian directed percolation L(t,k) by two independent estimators:
the largest eigenvalue of a tridiagonal GUE model (Brownian scaling), and a
discretized Gaussian lattice recurrence over mesh breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .stats import SampleSet, ks_two_sample
from .weights import StreamKey

_SQRT2 = math.sqrt(2.0)


class BisectionError(RuntimeError):
    pass


@dataclass(frozen=True)
class GUESample:
    k: int
    lambda_max: float


def gue_tridiagonal(k: int, rng: np.random.Generator):
    """Tridiagonal model whose spectrum matches the k x k GUE in the
    normalization with standard-normal diagonal and unit-variance complex
    off-diagonal entries (largest eigenvalue near 2 sqrt(k)).
    """
    d = rng.standard_normal(k)
    if k == 1:
        return d, np.empty(0)
    e = np.sqrt(rng.chisquare(2 * np.arange(k - 1, 0, -1))) / _SQRT2
    return d, e


def gue_lambda_max(k: int, key: StreamKey, tol: float = 1e-10) -> float:
    """Largest eigenvalue by Sturm-sequence bisection within the Gershgorin
    interval, one i.i.d. draw per key."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d, e = gue_tridiagonal(k, key.generator())
    lam, iters = kernels.sturm_lambda_max(
        np.ascontiguousarray(d), np.ascontiguousarray(e), tol, 200
    )
    if iters == -1:
        raise BisectionError(f"bisection did not converge for k={k}")
    return float(lam)


def sample_L_gue(t: float, k: int, key: StreamKey) -> float:
    """sqrt(t) * lambda_max(GUE_k): one draw of L(t,k) via Brownian scaling."""
    if t <= 0:
        raise ValueError("t must be positive")
    return math.sqrt(t) * gue_lambda_max(k, key)


@dataclass(frozen=True)
class BrownianMesh:
    t: float
    k: int
    delta: float
    columns: int = field(init=False)

    def __post_init__(self):
        if self.t <= 0 or self.k < 1 or not 0 < self.delta <= self.t:
            raise ValueError("need t > 0, k >= 1, 0 < delta <= t")
        object.__setattr__(self, "columns", int(math.ceil(self.t / self.delta)))


def mesh_increments(mesh: BrownianMesh, key: StreamKey) -> np.ndarray:
    """(k, columns) independent Brownian increments; the final column absorbs
    the remainder so the increments sum to B_t exactly in distribution."""
    rng = key.generator()
    z = rng.standard_normal((mesh.k, mesh.columns))
    sd = np.full(mesh.columns, math.sqrt(mesh.delta))
    last = mesh.t - (mesh.columns - 1) * mesh.delta
    sd[-1] = math.sqrt(max(last, 0.0))
    return z * sd


def mesh_value_from_increments(x: np.ndarray) -> float:
    """Maximum over mesh-restricted breakpoint vectors of the summed
    per-row increments (rows partition the columns)."""
    x = np.ascontiguousarray(x, dtype=float)
    k, M = x.shape
    d = np.full(M + 1, -np.inf)
    d[0] = 0.0
    for r in range(k):
        kernels.partition_row_update(d.copy(), x[r], d)
    return float(d[-1])


def sample_L_mesh(mesh: BrownianMesh, key: StreamKey) -> float:
    """Discrete lower-approximation of L(t,k); converges in law as delta -> 0."""
    return mesh_value_from_increments(mesh_increments(mesh, key))


def cross_check(
    k: int,
    N: int,
    master_seed: int = 0,
    delta: float = 1e-4,
) -> float:
    """Two-sample KS distance between the GUE and mesh estimators of L(1,k);
    validates the GUE normalization against the convention-free mesh."""
    if k > 8:
        raise ValueError("cross_check is limited to k <= 8")
    if N < 1000:
        raise ValueError("need N >= 1000")
    mesh = BrownianMesh(t=1.0, k=k, delta=delta)
    gue = np.array(
        [sample_L_gue(1.0, k, StreamKey(master_seed, i, 1)) for i in range(N)]
    )
    msh = np.array(
        [sample_L_mesh(mesh, StreamKey(master_seed, i, 2)) for i in range(N)]
    )
    return ks_two_sample(SampleSet.from_values(gue), SampleSet.from_values(msh))
