"""J-K strategy evaluation: the overlapping-holding return stream, per-strategy
statistics, the J x K grid and the four-way significance classification.

With K-month holding periods the position in month ``t`` is the average of
the K signals formed for months ``t-K+1 .. t``, and the month-``t`` strategy
excess return is that average times the asset's month-``t`` excess return.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DataError, InsufficientHistory, NoValidCells, ZeroVariance
from .market_data import MonthStamp, ReturnSeries, RiskFreeSeries, excess_returns
from .signals import SignalMethod, SignalSeries, signal_series
from .stats import (
    LagPolicy,
    Significance,
    SignificanceRule,
    annualize,
    nw_tstat,
)

DEFAULT_PERIODS = (1, 3, 6, 9, 12, 24, 36, 48, 60)


class Effect(enum.Enum):
    TSMOM = "TSMOM"
    TSCON = "TSCON"


def _check_periods(name: str, values) -> tuple[int, ...]:
    out = tuple(int(v) for v in values)
    if not out:
        raise ValueError(f"{name} must be nonempty")
    if any(v < 1 for v in out):
        raise ValueError(f"{name} must all be >= 1")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ValueError(f"{name} must be strictly increasing")
    return out


@dataclass(frozen=True)
class GridSpec:
    lookbacks: tuple[int, ...] = DEFAULT_PERIODS
    holdings: tuple[int, ...] = DEFAULT_PERIODS
    method: SignalMethod = SignalMethod.MOP
    lag_policy: LagPolicy = field(default_factory=LagPolicy.holding_linked)
    significance: SignificanceRule = field(default_factory=SignificanceRule)
    hl_uses_excess: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lookbacks", _check_periods("lookbacks", self.lookbacks))
        object.__setattr__(self, "holdings", _check_periods("holdings", self.holdings))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.lookbacks), len(self.holdings)

    def cells(self) -> list[tuple[int, int]]:
        return [(J, K) for J in self.lookbacks for K in self.holdings]


@dataclass(frozen=True)
class StrategyStats:
    J: int
    K: int
    mean_monthly: float
    annualized_er: float
    t_stat: float
    n_months: int
    lag: int
    significance: Significance

    @property
    def effect(self) -> Effect:
        # an exact zero mean falls to TSCON by convention; see zero_mean
        return Effect.TSMOM if self.mean_monthly > 0 else Effect.TSCON

    @property
    def zero_mean(self) -> bool:
        return self.mean_monthly == 0.0


@dataclass(frozen=True)
class CellError:
    """Per-cell failure marker; ``stats`` is kept when the mean is defined."""

    J: int
    K: int
    kind: str
    message: str
    stats: StrategyStats | None = None


Cell = StrategyStats | CellError


@dataclass(frozen=True)
class GridResult:
    spec: GridSpec
    cells: Mapping[tuple[int, int], Cell]
    label: str = ""

    def __post_init__(self):
        expected = self.spec.cells()
        if sorted(self.cells) != sorted(expected):
            raise ValueError("grid cells do not match the spec")
        for (J, K), c in self.cells.items():
            if (c.J, c.K) != (J, K):
                raise ValueError(f"cell at {(J, K)} carries indices {(c.J, c.K)}")
        object.__setattr__(self, "cells", {k: self.cells[k] for k in expected})

    def __getitem__(self, jk: tuple[int, int]) -> Cell:
        return self.cells[jk]

    def __len__(self):
        return len(self.cells)

    def valid_cells(self) -> list[StrategyStats]:
        return [c for c in self.cells.values() if isinstance(c, StrategyStats)]

    def matrix(self, attr: str = "annualized_er") -> np.ndarray:
        """J x K array of a StrategyStats attribute; NaN for error cells."""
        out = np.full(self.spec.shape, np.nan)
        for i, J in enumerate(self.spec.lookbacks):
            for j, K in enumerate(self.spec.holdings):
                c = self.cells[(J, K)]
                if isinstance(c, StrategyStats):
                    out[i, j] = getattr(c, attr)
        return out


def strategy_return(signals: SignalSeries, excess: ReturnSeries, K: int, t: MonthStamp) -> float:
    """Month-``t`` excess return of the J-K strategy.

    The position is the mean of the K signals in force during ``t``, i.e.
    those dated ``t-K+1 .. t``.
    """
    if K < 1:
        raise ValueError(f"holding period must be >= 1, got {K}")
    lo = (t - (K - 1)) - signals.start
    hi = t - signals.start + 1
    if lo < 0 or hi > len(signals):
        raise InsufficientHistory(f"signals do not cover {t - (K - 1)}..{t}")
    try:
        e = excess.value_at(t)
    except KeyError:
        raise InsufficientHistory(f"excess return missing at {t}") from None
    position = float(signals.values[lo:hi].sum()) / K
    return position * e


def _stream_from_signals(
    signals: SignalSeries, excess: ReturnSeries, K: int, asset: str
) -> ReturnSeries:
    if len(signals) < K:
        raise InsufficientHistory(f"{asset}: {len(signals)} signals cannot support holding {K}")
    pos = sliding_window_view(signals.values.astype(float), K).sum(axis=1) / K
    start = signals.start + (K - 1)
    off = start - excess.start
    e = excess.values[off : off + len(pos)]
    if off < 0 or len(e) != len(pos):
        raise InsufficientHistory(f"{asset}: excess returns do not cover the stream")
    return ReturnSeries(asset, start, pos * e)


def strategy_stream(
    returns: ReturnSeries,
    rf: RiskFreeSeries | None,
    J: int,
    K: int,
    method: SignalMethod,
    hl_uses_excess: bool = False,
) -> ReturnSeries:
    """Monthly strategy excess returns, starting at the first month whose K
    signals all have a full J-month window (month J + K of the input)."""
    sig = signal_series(returns, rf, J, method, hl_uses_excess)
    excess = returns if rf is None else excess_returns(returns, rf)
    return _stream_from_signals(sig, excess, K, returns.asset)


def stream_stats(
    stream: np.ndarray,
    J: int,
    K: int,
    lag_policy: LagPolicy,
    rule: SignificanceRule,
) -> StrategyStats:
    """Statistics of one strategy stream. Raises ZeroVariance (with the
    partial stats attached) when no t-statistic exists."""
    x = np.asarray(stream, dtype=float)
    if len(x) < 2:
        raise InsufficientHistory(f"J={J} K={K}: {len(x)} strategy months, need at least 2")
    mean = float(x.mean())
    lag = min(lag_policy.lag_for(K), len(x) - 1)
    partial = StrategyStats(J, K, mean, annualize(mean), float("nan"), len(x), lag, Significance.NONE)
    try:
        t = nw_tstat(x, lag)
    except ZeroVariance as exc:
        raise ZeroVariance(f"J={J} K={K}: zero long-run variance", stats=partial) from exc
    sig = Significance.NONE if mean == 0.0 else rule.classify(t)
    return StrategyStats(J, K, mean, annualize(mean), t, len(x), lag, sig)


def run_strategy(
    returns: ReturnSeries,
    rf: RiskFreeSeries | None,
    J: int,
    K: int,
    method: SignalMethod = SignalMethod.MOP,
    lag_policy: LagPolicy | None = None,
    rule: SignificanceRule | None = None,
    hl_uses_excess: bool = False,
) -> StrategyStats:
    lag_policy = lag_policy or LagPolicy.holding_linked()
    rule = rule or SignificanceRule()
    stream = strategy_stream(returns, rf, J, K, method, hl_uses_excess)
    return stream_stats(stream.values, J, K, lag_policy, rule)


def _as_cell(J: int, K: int, fn) -> Cell:
    try:
        return fn()
    except DataError as exc:
        return CellError(J, K, type(exc).__name__, str(exc), getattr(exc, "stats", None))


def _parallel_map(fn, items: list, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_grid(
    returns: ReturnSeries,
    rf: RiskFreeSeries | None,
    spec: GridSpec | None = None,
    workers: int = 1,
    label: str | None = None,
) -> GridResult:
    """Evaluate every (J, K) cell of ``spec`` on one series.

    Cells are independent; per-cell failures become :class:`CellError`
    markers. Output does not depend on ``workers``.
    """
    spec = spec or GridSpec()
    if len(returns) == 0:
        raise InsufficientHistory("empty input series")
    excess = returns if rf is None else excess_returns(returns, rf)

    def signals_for(J):
        try:
            return signal_series(returns, rf, J, spec.method, spec.hl_uses_excess)
        except InsufficientHistory as exc:
            return exc

    signals = dict(zip(spec.lookbacks, _parallel_map(signals_for, list(spec.lookbacks), workers)))

    def cell(jk):
        J, K = jk

        def compute():
            sig = signals[J]
            if isinstance(sig, Exception):
                raise sig
            stream = _stream_from_signals(sig, excess, K, returns.asset)
            return stream_stats(stream.values, J, K, spec.lag_policy, spec.significance)

        return _as_cell(J, K, compute)

    keys = spec.cells()
    cells = dict(zip(keys, _parallel_map(cell, keys, workers)))
    return GridResult(spec, cells, returns.asset if label is None else label)


class Category(enum.Enum):
    POS_SIG = "P w/S"
    POS_INSIG = "P w/o S"
    NEG_SIG = "N w/S"
    NEG_INSIG = "N w/o S"


@dataclass(frozen=True)
class ClassificationSummary:
    counts: Mapping[Category, int]
    level: str

    @property
    def n_valid(self) -> int:
        return sum(self.counts.values())

    @property
    def proportions(self) -> dict[Category, float]:
        n = self.n_valid
        return {c: self.counts[c] / n for c in Category}


def categorize(cell: StrategyStats, level: str = "5%") -> Category:
    if level == "5%":
        sig = cell.significance in (Significance.SIG5, Significance.SIG1)
    elif level == "1%":
        sig = cell.significance is Significance.SIG1
    else:
        raise ValueError(f"level must be '5%' or '1%', got {level!r}")
    if cell.effect is Effect.TSMOM:
        return Category.POS_SIG if sig else Category.POS_INSIG
    return Category.NEG_SIG if sig else Category.NEG_INSIG


def classify(grid: GridResult | Iterable[GridResult], level: str = "5%") -> ClassificationSummary:
    """Share of valid cells in each of the four sign/significance classes.

    Accepts one grid or several (pooled, as when summarizing a set of
    sector grids).
    """
    grids = [grid] if isinstance(grid, GridResult) else list(grid)
    counts = {c: 0 for c in Category}
    for g in grids:
        for cell in g.valid_cells():
            counts[categorize(cell, level)] += 1
    if sum(counts.values()) == 0:
        raise NoValidCells("no valid cells to classify")
    return ClassificationSummary(counts, level)
