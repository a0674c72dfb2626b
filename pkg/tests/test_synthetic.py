import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsmom import Ar1Spec, gen_ar1, gen_panel, gen_rw, log_returns, prices_from_returns

SEEDS = [0, 1, 2, 42, 2024]


def test_noiseless_fixed_point():
    r = gen_ar1(Ar1Spec(phi=0.0, mu=0.01, sigma=0.0, T=50))
    assert np.all(r.values == 0.01)


def test_noiseless_rw():
    assert np.all(gen_rw(-0.003, 0.0, 20, seed=9).values == -0.003)


@given(st.floats(-0.95, 0.95), st.integers(1, 200), st.integers(0, 2**32))
def test_deterministic(phi, T, seed):
    spec = Ar1Spec(phi=phi, sigma=0.05, T=T, seed=seed)
    assert np.array_equal(gen_ar1(spec).values, gen_ar1(spec).values)


def test_different_seeds_differ():
    a = gen_ar1(Ar1Spec(seed=1, T=20)).values
    b = gen_ar1(Ar1Spec(seed=2, T=20)).values
    assert not np.array_equal(a, b)


@pytest.mark.parametrize("seed", SEEDS)
def test_lag_one_autocorrelation(seed):
    x = gen_ar1(Ar1Spec(phi=0.5, sigma=1.0, T=10_000, seed=seed)).values
    d = x - x.mean()
    rho = np.dot(d[1:], d[:-1]) / np.dot(d, d)
    assert abs(rho - 0.5) < 0.05


@given(st.floats(0, 0.1), st.floats(0, 0.2), st.integers(1, 100), st.integers(0, 1000))
def test_rw_is_ar1_with_zero_phi(mu, sigma, T, seed):
    a = gen_rw(mu, sigma, T, seed)
    b = gen_ar1(Ar1Spec(phi=0.0, mu=mu, sigma=sigma, T=T, seed=seed))
    assert np.array_equal(a.values, b.values)


@pytest.mark.parametrize("seed", SEEDS)
def test_rw_mean(seed):
    assert abs(gen_rw(0.0, 1.0, 10_000, seed).values.mean()) < 0.05


@pytest.mark.parametrize("phi", [-0.5, 0.0, 0.3, 0.8])
@pytest.mark.parametrize("seed", SEEDS)
def test_stationary_mean_bound(phi, seed):
    T, sigma, mu = 10_000, 0.05, 0.01
    x = gen_ar1(Ar1Spec(phi=phi, mu=mu, sigma=sigma, T=T, seed=seed)).values
    assert abs(x.mean() - mu) < 3 * sigma / math.sqrt(T * (1 - phi) ** 2)


def test_stationary_variance():
    phi, sigma = 0.6, 1.0
    x = gen_ar1(Ar1Spec(phi=phi, sigma=sigma, T=20_000, seed=5)).values
    assert x.var() == pytest.approx(sigma**2 / (1 - phi**2), rel=0.05)


def test_panel_streams_order_independent():
    spec = Ar1Spec(phi=0.1, T=30, seed=11)
    small = gen_panel(spec, 3)
    big = gen_panel(spec, 12)
    for a, b in zip(small, big):
        assert np.array_equal(a.values, b.values)
    assert np.array_equal(big[7].values, gen_ar1(spec, stream=7).values)
    assert len({r.asset for r in big}) == 12


def test_panel_streams_distinct():
    rs = gen_panel(Ar1Spec(T=50, seed=0), 5)
    assert len({r.values.tobytes() for r in rs}) == 5


def test_spec_validation():
    for bad in (dict(phi=1.0), dict(phi=-1.2), dict(T=0), dict(sigma=-0.1)):
        with pytest.raises(ValueError):
            Ar1Spec(**bad)


def test_prices_roundtrip():
    r = gen_ar1(Ar1Spec(phi=0.2, T=120, seed=4))
    p = prices_from_returns(r, p0=10.0)
    assert p.start == r.start - 1 and p.close[0] == pytest.approx(10.0)
    back = log_returns(p)
    assert back.start == r.start
    np.testing.assert_allclose(back.values, r.values, rtol=0, atol=1e-12)
