import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpplab.weights import (
    InvalidSpecError,
    StreamKey,
    WeightSpec,
    bernoulli,
    exponential,
    gaussian,
    geometric,
    pareto,
    sample_row,
    uniform,
)

ALL_SPECS = [
    exponential(1.0),
    exponential(2.5),
    geometric(0.5),
    geometric(0.2),
    bernoulli(0.5, lo=-1.0, hi=1.0),
    bernoulli(0.3),
    uniform(0.0, 1.0),
    uniform(-2.0, 3.0),
    gaussian(0.0, 1.0),
    gaussian(1.5, 0.5),
    pareto(4.0),
    pareto(2.5, xm=2.0),
]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.to_text())
def test_empirical_moments_match_declared(spec):
    n = 10**6
    x = sample_row(spec, StreamKey(42, 0, 1), n)
    se_mean = math.sqrt(spec.sigma2 / n)
    assert abs(x.mean() - spec.mu) < 5 * se_mean
    # variance SE from the fourth moment, estimated empirically
    se_var = np.sqrt(np.var((x - x.mean()) ** 2) / n)
    assert abs(x.var(ddof=1) - spec.sigma2) < 5 * se_var


def test_bernoulli_pm1_support():
    spec = bernoulli(0.5, lo=-1.0, hi=1.0)
    x = sample_row(spec, StreamKey(1, 0, 1), 4)
    assert set(x) <= {-1.0, 1.0}


def test_exponential_lln():
    x = sample_row(exponential(1.0), StreamKey(0, 0, 1), 10**6)
    assert abs(x.mean() - 1.0) < 0.01


def test_determinism_same_key():
    spec = uniform()
    a = sample_row(spec, StreamKey(9, 3, 2), 1000)
    b = sample_row(spec, StreamKey(9, 3, 2), 1000)
    assert np.array_equal(a, b)


def test_distinct_keys_differ():
    spec = gaussian()
    a = sample_row(spec, StreamKey(9, 3, 2), 100)
    b = sample_row(spec, StreamKey(9, 3, 3), 100)
    c = sample_row(spec, StreamKey(9, 4, 2), 100)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_row_streams_uncorrelated():
    spec = gaussian()
    n = 10**5
    a = sample_row(spec, StreamKey(7, 0, 1), n)
    b = sample_row(spec, StreamKey(7, 0, 2), n)
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) < 0.01
    lag1 = np.corrcoef(a[:-1], b[1:])[0, 1]
    assert abs(lag1) < 0.01


@pytest.mark.parametrize(
    "spec",
    [s for s in ALL_SPECS if s.family not in ("geometric", "bernoulli")],
    ids=lambda s: s.to_text(),
)
def test_quantile_cdf_roundtrip_continuous(spec):
    lo = spec.quantile(1e-4)
    hi = spec.quantile(1.0 - 1e-4)
    for x in np.linspace(lo + 1e-9, hi, 41):
        u = spec.cdf(x)
        assert spec.quantile(u) == pytest.approx(x, abs=1e-10 * max(1.0, abs(x)))


def test_quantile_examples():
    assert exponential(1.0).quantile(1.0 - math.exp(-1.0)) == pytest.approx(1.0, abs=1e-12)
    assert gaussian().quantile(0.5) == pytest.approx(0.0, abs=1e-12)
    # enumerated CDF steps for the {1,2,...} geometric with q = 1/2:
    # F(1) = 0.5, F(2) = 0.75, so the 0.6-quantile is 2
    assert geometric(0.5).quantile(0.6) == 2.0


def test_geometric_quantile_matches_cdf_enumeration():
    q = 0.3
    spec = geometric(q)
    cdf_steps = np.cumsum([q * (1 - q) ** (m - 1) for m in range(1, 60)])
    for u in np.linspace(0.01, 0.999, 97):
        expected = int(np.searchsorted(cdf_steps, u) + 1)
        assert spec.quantile(u) == expected


@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999))
@settings(max_examples=200, deadline=None)
def test_quantile_nondecreasing(u1, u2):
    u1, u2 = sorted((u1, u2))
    for spec in (exponential(1.0), geometric(0.4), uniform(), gaussian(), pareto(3.0)):
        assert spec.quantile(u1) <= spec.quantile(u2)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.to_text())
def test_standardize(spec):
    std = spec.standardize()
    assert std.mu == pytest.approx(0.0, abs=1e-12)
    assert std.sigma2 == pytest.approx(1.0, rel=1e-12)
    assert std.p_index == spec.p_index


def test_standardize_gaussian_identity():
    std = gaussian(0.0, 1.0).standardize()
    assert std.is_standard_gaussian


def test_standardized_uniform_sample_mean():
    std = uniform(0.0, 1.0).standardize()
    x = sample_row(std, StreamKey(3, 0, 1), 10**6)
    assert abs(x.mean()) < 0.01


def test_declared_moments_match_analytic():
    # closed forms recomputed independently
    assert exponential(2.0).mu == pytest.approx(0.5, rel=1e-12)
    assert exponential(2.0).sigma2 == pytest.approx(0.25, rel=1e-12)
    assert geometric(0.25).mu == pytest.approx(4.0, rel=1e-12)
    assert geometric(0.25).sigma2 == pytest.approx(12.0, rel=1e-12)
    assert uniform(0, 1).sigma2 == pytest.approx(1.0 / 12.0, rel=1e-12)
    al = 3.0
    assert pareto(al).mu == pytest.approx(al / (al - 1), rel=1e-12)
    assert pareto(al).sigma2 == pytest.approx(al / ((al - 1) ** 2 * (al - 2)), rel=1e-12)


def test_p_index():
    assert math.isinf(exponential(1.0).p_index)
    assert math.isinf(gaussian().p_index)
    p = pareto(3.0).p_index
    assert p < 3.0 and p > 2.999999


def test_invalid_params_rejected():
    with pytest.raises(InvalidSpecError):
        exponential(-1.0)
    with pytest.raises(InvalidSpecError):
        geometric(1.5)
    with pytest.raises(InvalidSpecError):
        pareto(1.5)
    with pytest.raises(InvalidSpecError):
        uniform(2.0, 1.0)
    with pytest.raises(InvalidSpecError):
        WeightSpec("cauchy", {})


def test_quantile_domain():
    with pytest.raises(ValueError):
        exponential(1.0).quantile(0.0)
    with pytest.raises(ValueError):
        exponential(1.0).quantile(1.0)


def test_degenerate_standardize_rejected():
    spec = uniform(0.0, 1.0)
    degenerate = WeightSpec("uniform", {"a": 0.0, "b": 1.0}, scale=1e-300)
    with pytest.raises(InvalidSpecError):
        degenerate.standardize()
    assert spec.standardize().sigma2 == pytest.approx(1.0)


def test_serialization_roundtrip():
    for spec in ALL_SPECS + [exponential(1.0).standardize()]:
        back = WeightSpec.from_text(spec.to_text())
        assert back == spec
    assert "family=exponential" in exponential(1.0).to_text()


def test_serialization_rejects_garbage():
    with pytest.raises(InvalidSpecError):
        WeightSpec.from_text("rate=1.0")
    with pytest.raises(InvalidSpecError):
        WeightSpec.from_text("family=exponential, nonsense")
