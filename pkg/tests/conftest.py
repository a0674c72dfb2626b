import numpy as np
import pytest
from hypothesis import settings

from tsmom import (
    Ar1Spec,
    Factor,
    FactorPanel,
    RiskFreeSeries,
    Sector,
    SectorMap,
    gen_panel,
    prices_from_returns,
)
from tsmom import io as tio

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def panel_files(tmp_path_factory):
    """A 30-stock synthetic panel with prices, zero risk-free, closing-price
    factor and a round-robin sector map (3 stocks per sector)."""
    d = tmp_path_factory.mktemp("panel")
    series = gen_panel(Ar1Spec(phi=0.1, mu=0.002, sigma=0.06, T=240, seed=7), 30)
    prices = [prices_from_returns(r, p0=5.0 + 3.0 * i) for i, r in enumerate(series)]
    tio.write_prices(prices, d / "prices.csv")
    tio.write_riskfree(RiskFreeSeries.constant(series[0].span, 0.002), d / "rf.csv")
    cells = {}
    for p in prices:
        for i in range(len(p)):
            cells[(p.asset, p.start + i)] = float(p.close[i])
    tio.write_factors([FactorPanel(Factor.ClosingPrice, cells)], d / "factors.csv")
    sectors = list(Sector)
    tio.write_sectors(
        SectorMap({p.asset: sectors[i % len(sectors)] for i, p in enumerate(prices)}), d / "sectors.csv"
    )
    return d
