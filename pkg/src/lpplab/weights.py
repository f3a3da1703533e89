"""Weight distributions: declared moments, quantile functions, and
reproducible per-(replica, row) random streams via counter-based Philox keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtr, ndtri

FAMILIES = ("exponential", "geometric", "bernoulli", "uniform", "gaussian", "pareto")

# Largest admissible sub-indices so (replica, row) pack into one 64-bit word.
_ROW_BITS = 20
MAX_ROW_INDEX = (1 << _ROW_BITS) - 1
MAX_REPLICA_INDEX = (1 << (64 - _ROW_BITS)) - 1

_U_LO = 1e-16
_U_HI = 1.0 - 1e-16


class InvalidSpecError(ValueError):
    pass


def _validate_params(family: str, params: dict[str, float]) -> None:
    if family == "exponential":
        if params.get("rate", 0.0) <= 0:
            raise InvalidSpecError("exponential rate must be positive")
    elif family == "geometric":
        q = params.get("q", 0.0)
        if not 0 < q < 1:
            raise InvalidSpecError("geometric success probability must lie in (0,1)")
    elif family == "bernoulli":
        p = params.get("p", -1.0)
        if not 0 < p < 1:
            raise InvalidSpecError("bernoulli probability must lie in (0,1)")
        if params.get("hi", 1.0) <= params.get("lo", 0.0):
            raise InvalidSpecError("bernoulli needs lo < hi")
    elif family == "uniform":
        if params.get("b", 1.0) <= params.get("a", 0.0):
            raise InvalidSpecError("uniform needs a < b")
    elif family == "gaussian":
        if params.get("std", 1.0) <= 0:
            raise InvalidSpecError("gaussian std must be positive")
    elif family == "pareto":
        if params.get("alpha", 0.0) <= 2:
            raise InvalidSpecError("pareto alpha must exceed 2 (finite variance)")
        if params.get("xm", 1.0) <= 0:
            raise InvalidSpecError("pareto xm must be positive")
    else:
        raise InvalidSpecError(f"unknown family {family!r}")


def _base_moments(family: str, p: dict[str, float]) -> tuple[float, float]:
    if family == "exponential":
        lam = p["rate"]
        return 1.0 / lam, 1.0 / lam**2
    if family == "geometric":
        q = p["q"]
        return 1.0 / q, (1.0 - q) / q**2
    if family == "bernoulli":
        pr, lo, hi = p["p"], p["lo"], p["hi"]
        return lo + (hi - lo) * pr, (hi - lo) ** 2 * pr * (1.0 - pr)
    if family == "uniform":
        a, b = p["a"], p["b"]
        return 0.5 * (a + b), (b - a) ** 2 / 12.0
    if family == "gaussian":
        return p["mean"], p["std"] ** 2
    if family == "pareto":
        al, xm = p["alpha"], p["xm"]
        return al * xm / (al - 1.0), xm**2 * al / ((al - 1.0) ** 2 * (al - 2.0))
    raise InvalidSpecError(family)


@dataclass(frozen=True)
class WeightSpec:
    """A weight law: family + parameters, optionally affinely transformed.

    The realized variable is loc + scale * X_base, which is how standardized
    specs keep exact closed-form quantiles.
    """

    family: str
    params: dict[str, float] = field(default_factory=dict)
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        _validate_params(self.family, self.params)
        if self.scale <= 0:
            raise InvalidSpecError("scale must be positive")

    @property
    def mu(self) -> float:
        m, _ = _base_moments(self.family, self.params)
        return self.loc + self.scale * m

    @property
    def sigma2(self) -> float:
        _, v = _base_moments(self.family, self.params)
        return self.scale**2 * v

    @property
    def p_index(self) -> float:
        if self.family == "pareto":
            # E|X|^p finite iff p < alpha; report just below the boundary.
            return math.nextafter(self.params["alpha"], 0.0)
        return math.inf

    def _base_quantile(self, u: np.ndarray) -> np.ndarray:
        p = self.params
        if self.family == "exponential":
            return -np.log1p(-u) / p["rate"]
        if self.family == "geometric":
            # Support {1,2,...}: F(m) = 1 - (1-q)^m.
            return np.ceil(np.log1p(-u) / math.log1p(-p["q"]))
        if self.family == "bernoulli":
            return np.where(u <= 1.0 - p["p"], p["lo"], p["hi"]).astype(float)
        if self.family == "uniform":
            return p["a"] + (p["b"] - p["a"]) * u
        if self.family == "gaussian":
            return p["mean"] + p["std"] * ndtri(u)
        if self.family == "pareto":
            return p["xm"] * (1.0 - u) ** (-1.0 / p["alpha"])
        raise InvalidSpecError(self.family)

    def quantile(self, u):
        """Left-continuous inverse CDF, exact closed form per family."""
        scalar = np.isscalar(u)
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0.0) | (u >= 1.0)):
            raise ValueError("quantile argument must lie strictly in (0,1)")
        q = self.loc + self.scale * self._base_quantile(u)
        return float(q) if scalar else q

    def cdf(self, x):
        scalar = np.isscalar(x)
        x = (np.asarray(x, dtype=float) - self.loc) / self.scale
        p = self.params
        if self.family == "exponential":
            c = np.where(x < 0, 0.0, -np.expm1(-p["rate"] * np.maximum(x, 0.0)))
        elif self.family == "geometric":
            m = np.floor(x)
            c = np.where(m < 1, 0.0, -np.expm1(np.maximum(m, 0.0) * math.log1p(-p["q"])))
        elif self.family == "bernoulli":
            c = np.where(x < p["lo"], 0.0, np.where(x < p["hi"], 1.0 - p["p"], 1.0))
        elif self.family == "uniform":
            c = np.clip((x - p["a"]) / (p["b"] - p["a"]), 0.0, 1.0)
        elif self.family == "gaussian":
            c = ndtr((x - p["mean"]) / p["std"])
        elif self.family == "pareto":
            c = np.where(x < p["xm"], 0.0, 1.0 - (p["xm"] / np.maximum(x, p["xm"])) ** p["alpha"])
        else:
            raise InvalidSpecError(self.family)
        return float(c) if scalar else c

    def standardize(self) -> "WeightSpec":
        """Spec of (X - mu)/sigma: mean 0, variance 1, same p_index."""
        s2 = self.sigma2
        if s2 <= 0:
            raise InvalidSpecError("cannot standardize a degenerate distribution")
        sd = math.sqrt(s2)
        return replace(self, loc=(self.loc - self.mu) / sd, scale=self.scale / sd)

    @property
    def is_standard_gaussian(self) -> bool:
        return (
            self.family == "gaussian"
            and abs(self.mu) < 1e-12
            and abs(self.sigma2 - 1.0) < 1e-12
        )

    def to_text(self) -> str:
        parts = [f"family={self.family}"]
        parts += [f"{k}={v!r}" for k, v in sorted(self.params.items())]
        if self.loc != 0.0 or self.scale != 1.0:
            parts += [f"loc={self.loc!r}", f"scale={self.scale!r}"]
        return ", ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "WeightSpec":
        fields: dict[str, str] = {}
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "=" not in chunk:
                raise InvalidSpecError(f"malformed spec fragment {chunk!r}")
            k, v = chunk.split("=", 1)
            fields[k.strip()] = v.strip()
        if "family" not in fields:
            raise InvalidSpecError("spec fragment missing family")
        family = fields.pop("family")
        loc = float(fields.pop("loc", "0"))
        scale = float(fields.pop("scale", "1"))
        params = {k: float(v) for k, v in fields.items()}
        return cls(family=family, params=params, loc=loc, scale=scale)


def exponential(rate: float = 1.0) -> WeightSpec:
    return WeightSpec("exponential", {"rate": rate})


def geometric(q: float) -> WeightSpec:
    return WeightSpec("geometric", {"q": q})


def bernoulli(p: float = 0.5, lo: float = 0.0, hi: float = 1.0) -> WeightSpec:
    return WeightSpec("bernoulli", {"p": p, "lo": lo, "hi": hi})


def uniform(a: float = 0.0, b: float = 1.0) -> WeightSpec:
    return WeightSpec("uniform", {"a": a, "b": b})


def gaussian(mean: float = 0.0, std: float = 1.0) -> WeightSpec:
    return WeightSpec("gaussian", {"mean": mean, "std": std})


def pareto(alpha: float, xm: float = 1.0) -> WeightSpec:
    return WeightSpec("pareto", {"alpha": alpha, "xm": xm})


@dataclass(frozen=True)
class StreamKey:
    """Counter-based stream identity: identical keys give bit-identical
    streams, distinct keys give independent ones, independent of evaluation
    order across workers.
    """

    master_seed: int
    replica_index: int = 0
    row_index: int = 0

    def __post_init__(self):
        if not 0 <= self.replica_index <= MAX_REPLICA_INDEX:
            raise ValueError("replica_index out of range")
        if not 0 <= self.row_index <= MAX_ROW_INDEX:
            raise ValueError("row_index out of range")

    def with_row(self, row_index: int) -> "StreamKey":
        return StreamKey(self.master_seed, self.replica_index, row_index)

    def generator(self) -> np.random.Generator:
        word = (self.replica_index << _ROW_BITS) | self.row_index
        key = np.array(
            [self.master_seed & 0xFFFFFFFFFFFFFFFF, word], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))


def sample_uniforms(key: StreamKey, count: int) -> np.ndarray:
    u = key.generator().random(count)
    np.clip(u, _U_LO, _U_HI, out=u)
    return u


def sample_row(spec: WeightSpec, key: StreamKey, count: int) -> np.ndarray:
    """count i.i.d. draws from spec, deterministic given key."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return spec.quantile(sample_uniforms(key, count))
