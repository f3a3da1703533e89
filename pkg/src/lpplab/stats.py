"""Empirical distribution machinery: sample sets, the near-axis
centering/scaling rule, Kolmogorov-Smirnov distances, and log-log exponent
regression.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import floor_power

__all__ = [
    "SampleSet",
    "ScalingRule",
    "apply_scaling",
    "ks_one_sample",
    "ks_two_sample",
    "ks_critical_value",
    "fit_exponent",
    "moments",
]


@dataclass(frozen=True)
class SampleSet:
    """Sorted i.i.d. replica statistics with ECDF queries."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, values, meta: dict | None = None) -> "SampleSet":
        v = np.sort(np.asarray(values, dtype=float))
        return cls(values=v, meta=dict(meta or {}))

    @property
    def n_replicas(self) -> int:
        return len(self.values)

    def ecdf(self, x) -> np.ndarray:
        return np.searchsorted(self.values, x, side="right") / self.n_replicas

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in sorted(self.meta.items()):
            buf.write(f"# {k} = {v}\n")
        for v in self.values:
            buf.write(f"{float(v)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampleSet":
        meta: dict = {}
        vals = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                k, _, v = line[1:].partition("=")
                meta[k.strip()] = v.strip()
            else:
                vals.append(float(line))
        return cls.from_values(vals, meta)


@dataclass(frozen=True)
class ScalingRule:
    """Near-axis centering n*mu + 2*sigma*n^((1+a)/2) and scale
    sigma*n^(1/2 - a/6)."""

    n: int
    a: float
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def center(self) -> float:
        return self.n * self.mu + 2.0 * self.sigma * self.n ** ((1.0 + self.a) / 2.0)

    @property
    def scale(self) -> float:
        return self.sigma * self.n ** (0.5 - self.a / 6.0)

    @property
    def rows(self) -> int:
        return floor_power(self.n, self.a)


def apply_scaling(raw: SampleSet, rule: ScalingRule) -> SampleSet:
    scaled = (raw.values - rule.center) / rule.scale
    meta = dict(raw.meta)
    meta.update(n=rule.n, a=rule.a, mu=rule.mu, sigma=rule.sigma)
    return SampleSet(values=scaled, meta=meta)


def identity_scaled(values, **meta) -> SampleSet:
    return SampleSet.from_values(values, meta)


def ks_one_sample(s: SampleSet, cdf) -> float:
    """sup_x |ECDF(x) - cdf(x)|, both one-sided gaps at the sample points."""
    if s.n_replicas < 2:
        raise ValueError("need at least 2 replicas")
    n = s.n_replicas
    F = np.asarray(cdf(s.values), dtype=float)
    hi = np.arange(1, n + 1) / n - F
    lo = F - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def ks_two_sample(s1: SampleSet, s2: SampleSet) -> float:
    if s1.n_replicas == 0 or s2.n_replicas == 0:
        raise ValueError("both sample sets must be nonempty")
    merged = np.concatenate([s1.values, s2.values])
    return float(np.max(np.abs(s1.ecdf(merged) - s2.ecdf(merged))))


def ks_critical_value(n1: int, n2: int | None = None, alpha: float = 0.01) -> float:
    """Asymptotic KS critical value; two-sample when n2 is given."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    if n2 is None:
        return c / math.sqrt(n1)
    return c * math.sqrt((n1 + n2) / (n1 * n2))


def fit_exponent(points) -> tuple[float, float, float]:
    """OLS of log y on log n -> (slope, intercept, slope standard error)."""
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    ns = [p[0] for p in pts]
    if len(set(ns)) != len(ns):
        raise ValueError("n values must be distinct")
    if any(p[1] <= 0 for p in pts):
        raise ValueError("y values must be positive")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    m = len(pts)
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / sxx)
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    if m > 2:
        s2 = float(np.sum(resid**2)) / (m - 2)
        stderr = math.sqrt(s2 / sxx)
    else:
        stderr = 0.0
    return slope, intercept, stderr


def moments(s: SampleSet) -> tuple[float, float, float]:
    """(mean, unbiased variance, sample skewness)."""
    if s.n_replicas < 3:
        raise ValueError("need at least 3 replicas")
    v = s.values
    m = float(v.mean())
    var = float(v.var(ddof=1))
    sd = math.sqrt(var) if var > 0 else 0.0
    skew = float(((v - m) ** 3).mean() / sd**3) if sd > 0 else 0.0
    return m, var, skew
