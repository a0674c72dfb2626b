"""Seeded AR(1) and random-walk return generators.

Randomness comes from numpy's PCG64 bit generator seeded with
``SeedSequence([seed, stream])``; ``stream`` is the asset index, so each
asset of a panel has its own reproducible stream regardless of how many
assets are generated or in what order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .market_data import MonthStamp, PriceSeries, ReturnSeries

DEFAULT_START = MonthStamp(1991, 1)


@dataclass(frozen=True)
class Ar1Spec:
    phi: float = 0.0
    mu: float = 0.0
    sigma: float = 0.05
    T: int = 600
    seed: int = 0

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise ValueError(f"|phi| must be < 1, got {self.phi}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def gen_ar1(
    spec: Ar1Spec,
    asset: str = "SYN",
    stream: int = 0,
    start: MonthStamp = DEFAULT_START,
) -> ReturnSeries:
    """r_t = mu + phi (r_{t-1} - mu) + eps_t, with r_0 from the stationary law."""
    z = rng_for(spec.seed, stream).standard_normal(spec.T)
    r = np.empty(spec.T)
    r[0] = spec.mu + spec.sigma / math.sqrt(1.0 - spec.phi**2) * z[0]
    for t in range(1, spec.T):
        r[t] = spec.mu + spec.phi * (r[t - 1] - spec.mu) + spec.sigma * z[t]
    return ReturnSeries(asset, start, r)


def gen_rw(mu: float, sigma: float, T: int, seed: int, **kwargs) -> ReturnSeries:
    """i.i.d. normal returns: log prices follow a random walk with drift."""
    return gen_ar1(Ar1Spec(0.0, mu, sigma, T, seed), **kwargs)


def gen_panel(spec: Ar1Spec, n_assets: int, prefix: str = "S", start=DEFAULT_START):
    width = len(str(max(n_assets - 1, 0)))
    return [
        gen_ar1(spec, f"{prefix}{i:0{width}d}", stream=i, start=start)
        for i in range(n_assets)
    ]


def prices_from_returns(returns: ReturnSeries, p0: float = 100.0) -> PriceSeries:
    """Price path whose log returns are ``returns``; starts one month earlier.

    Close and adjusted close are identical.
    """
    logp = math.log(p0) + np.concatenate([[0.0], np.cumsum(returns.values)])
    p = np.exp(logp)
    return PriceSeries(returns.asset, returns.start - 1, p, p)
