"""Time-series momentum and contrarian research engine for monthly panels."""

from .backtest import (
    Category,
    CellError,
    ClassificationSummary,
    Effect,
    GridResult,
    GridSpec,
    StrategyStats,
    classify,
    run_grid,
    run_strategy,
    strategy_return,
    strategy_stream,
)
from .cross_section import (
    GroupAssignment,
    GroupGridSet,
    RegressionDataset,
    build_regression_dataset,
    form_quintiles,
    group_grids,
    group_returns,
    quintile_assignment,
    sector_index_grid,
    sector_within_grid,
)
from .market_data import (
    Factor,
    FactorPanel,
    MonthSpan,
    MonthStamp,
    PriceSeries,
    ReturnSeries,
    RiskFreeSeries,
    Sector,
    SectorMap,
    align,
    excess_returns,
    log_returns,
)
from .signals import SignalMethod, SignalSeries, signal_hl, signal_mop, signal_series
from .stats import LagPolicy, RegressionFit, SignificanceRule, annualize, nw_tstat, nw_variance, ols_fit
from .synthetic import Ar1Spec, gen_ar1, gen_panel, gen_rw, prices_from_returns

__all__ = [
    "Category",
    "CellError",
    "ClassificationSummary",
    "Effect",
    "GridResult",
    "GridSpec",
    "StrategyStats",
    "classify",
    "run_grid",
    "run_strategy",
    "strategy_return",
    "strategy_stream",
    "GroupAssignment",
    "GroupGridSet",
    "RegressionDataset",
    "build_regression_dataset",
    "form_quintiles",
    "group_grids",
    "group_returns",
    "quintile_assignment",
    "sector_index_grid",
    "sector_within_grid",
    "Factor",
    "FactorPanel",
    "MonthSpan",
    "MonthStamp",
    "PriceSeries",
    "ReturnSeries",
    "RiskFreeSeries",
    "Sector",
    "SectorMap",
    "align",
    "excess_returns",
    "log_returns",
    "SignalMethod",
    "SignalSeries",
    "signal_hl",
    "signal_mop",
    "signal_series",
    "LagPolicy",
    "RegressionFit",
    "SignificanceRule",
    "annualize",
    "nw_tstat",
    "nw_variance",
    "ols_fit",
    "Ar1Spec",
    "gen_ar1",
    "gen_panel",
    "gen_rw",
    "prices_from_returns",
]

__version__ = "0.1.0"
