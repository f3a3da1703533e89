"""Measurable coupling of lattice weights to Brownian driving noise via the
quantile transform, plus the coupled passage-time difference T - L and the
walk/bridge discrepancy statistics it is controlled by.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d
from scipy.special import ndtr

from . import kernels
from .lattice import LatticeInstance, floor_power, passage_time
from .weights import StreamKey, WeightSpec, _U_HI, _U_LO


def _require_standardized(spec: WeightSpec) -> None:
    if abs(spec.mu) > 1e-9 or abs(spec.sigma2 - 1.0) > 1e-9:
        raise ValueError("coupling requires a standardized spec (mu=0, sigma2=1)")


@dataclass(frozen=True)
class CoupledRow:
    """One weight row and the Brownian path sharing its driving noise."""

    walk: np.ndarray          # S_m, m = 1..n+1
    bridge_values: np.ndarray  # B_m at integer times m = 1..n+1
    v_stat: float             # max_m |B_m - S_m|
    w_stat: float             # sup of |B_s - B_t| over |s-t| < 2 (grid estimate)
    clamped: int               # count of quantile arguments clipped at 0/1


def _coupled_weights(spec: WeightSpec, unit_increments: np.ndarray):
    """Weights sharing the unit increments' noise: omega = Q(Phi(g)).

    For the standard gaussian spec the coupling is the identity and is taken
    literally (no Phi/Q round trip), so v_stat is exactly zero.
    """
    if spec.is_standard_gaussian:
        return unit_increments.copy(), 0
    u = ndtr(unit_increments)
    clamped = int(np.count_nonzero((u < _U_LO) | (u > _U_HI)))
    np.clip(u, _U_LO, _U_HI, out=u)
    return spec.quantile(u), clamped


def _row_noise(key: StreamKey, n: int, refine: int) -> np.ndarray:
    """Brownian increments on the refined grid over [0, n+1]."""
    rng = key.generator()
    return rng.standard_normal((n + 1) * refine) * math.sqrt(1.0 / refine)


def _w_stat(fine_B: np.ndarray, refine: int) -> float:
    window = 2 * refine + 1
    hi = maximum_filter1d(fine_B, size=window, mode="nearest")
    lo = minimum_filter1d(fine_B, size=window, mode="nearest")
    return float(np.max(hi - lo))


def quantile_couple_row(
    spec: WeightSpec, key: StreamKey, n: int, refine: int = 16
) -> CoupledRow:
    """Couple n+1 weights to one Brownian path on [0, n+1].

    The path is generated on a grid of `refine` sub-steps per unit time;
    weights come from the unit-time increments by the quantile transform, so
    their marginal law is exactly spec's i.i.d. law.
    """
    _require_standardized(spec)
    if refine < 4:
        raise ValueError("refine must be >= 4")
    fine = _row_noise(key, n, refine)
    B_fine = np.concatenate([[0.0], np.cumsum(fine)])
    B_int = B_fine[refine::refine]  # B_1 .. B_{n+1}
    g = np.diff(np.concatenate([[0.0], B_int]))
    w, clamped = _coupled_weights(spec, g)
    if spec.is_standard_gaussian:
        # identity coupling: the walk IS the bridge, so v vanishes exactly
        # (summing the increments back would reintroduce rounding noise)
        walk = B_int
        v = 0.0
    else:
        walk = np.cumsum(w)
        v = float(np.max(np.abs(B_int - walk)))
    return CoupledRow(
        walk=walk,
        bridge_values=B_int,
        v_stat=v,
        w_stat=_w_stat(B_fine, refine),
        clamped=clamped,
    )


@dataclass(frozen=True)
class CoupledDifference:
    T_value: float
    L_value: float
    diff: float
    v_max: float
    w_max: float


def coupled_difference(
    spec: WeightSpec,
    n: int,
    a: float,
    key: StreamKey,
    delta: float = 0.25,
) -> CoupledDifference:
    """T(n, floor(n^a)) and the mesh estimate of L(n, floor(n^a)) driven by
    the same Brownian noise, plus their absolute difference and the row-wise
    maxima of the discrepancy statistics.
    """
    _require_standardized(spec)
    refine = int(round(1.0 / delta))
    if abs(refine * delta - 1.0) > 1e-12 or refine < 1:
        raise ValueError("delta must be the reciprocal of a positive integer")
    k = floor_power(n, a)
    width = n + 1
    M = n * refine  # L(n, k): breakpoints in [0, n]

    t = np.empty(width)
    d = np.full(M + 1, -np.inf)
    d[0] = 0.0
    v_max = 0.0
    w_max = 0.0
    sqrt_h = math.sqrt(1.0 / refine)
    for r in range(1, k + 1):
        fine = key.with_row(r).generator().standard_normal(width * refine) * sqrt_h
        B_fine = np.concatenate([[0.0], np.cumsum(fine)])
        B_int = B_fine[refine::refine]
        g = np.diff(np.concatenate([[0.0], B_int]))
        w, _ = _coupled_weights(spec, g)
        if r == 1:
            kernels.lpp_first_row(w, t)
        else:
            kernels.lpp_row_update(t.copy(), w, t)
        kernels.partition_row_update(d.copy(), fine[:M], d)
        if not spec.is_standard_gaussian:
            v_max = max(v_max, float(np.max(np.abs(B_int - np.cumsum(w)))))
        w_max = max(w_max, _w_stat(B_fine, refine))
    T = float(t[-1])
    L = float(d[-1])
    return CoupledDifference(T_value=T, L_value=L, diff=abs(T - L), v_max=v_max, w_max=w_max)


def walk_form_passage_time(inst: LatticeInstance) -> float:
    """T via its walk reformulation: sup over nondecreasing breakpoints u of
    the summed walk increments S_{floor(u_r)+1} - S_{floor(u_{r-1})}.
    Small-instance oracle confirming the reformulation matches the lattice DP.
    """
    from itertools import combinations_with_replacement

    n, k = inst.n, inst.k
    walks = []
    for r in range(1, k + 1):
        walks.append(np.concatenate([[0.0], np.cumsum(inst.row(r))]))
    best = -math.inf
    for u in combinations_with_replacement(range(n + 1), k - 1):
        bounds = (0,) + u + (n,)
        acc = 0.0
        for r in range(1, k + 1):
            acc += walks[r - 1][bounds[r] + 1] - walks[r - 1][bounds[r - 1]]
        best = max(best, acc)
    return best
