"""Monthly panel data model: calendar months, price/return/risk-free series,
factor panels and sector maps.

All series are gap-free by construction: they store a start month and a
contiguous value array, so a month index maps to an array offset.
"""

from __future__ import annotations

import bisect
import enum
import math
import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    GapInSeries,
    InsufficientHistory,
    MissingRiskFree,
    NonPositivePrice,
    DataError,
)

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


@total_ordering
@dataclass(frozen=True)
class MonthStamp:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @property
    def index(self) -> int:
        """Months since year 0, January; differences are month counts."""
        return self.year * 12 + self.month - 1

    @classmethod
    def from_index(cls, index: int) -> "MonthStamp":
        year, m = divmod(index, 12)
        return cls(year, m + 1)

    @classmethod
    def parse(cls, text: str) -> "MonthStamp":
        m = _MONTH_RE.match(text.strip())
        if m is None:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def succ(self) -> "MonthStamp":
        return self + 1

    def pred(self) -> "MonthStamp":
        return self - 1

    def __add__(self, months: int) -> "MonthStamp":
        if not isinstance(months, (int, np.integer)):
            return NotImplemented
        return MonthStamp.from_index(self.index + int(months))

    def __sub__(self, other):
        if isinstance(other, MonthStamp):
            return self.index - other.index
        if isinstance(other, (int, np.integer)):
            return MonthStamp.from_index(self.index - int(other))
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, MonthStamp):
            return NotImplemented
        return (self.year, self.month) < (other.year, other.month)

    def __str__(self):
        return f"{self.year:04d}-{self.month:02d}"


class MonthSpan:
    """Closed interval of months. All empty spans compare equal."""

    __slots__ = ("start", "end")

    def __init__(self, start: MonthStamp | None, end: MonthStamp | None):
        if start is None or end is None or end < start:
            start = end = None
        self.start = start
        self.end = end

    @classmethod
    def empty(cls) -> "MonthSpan":
        return cls(None, None)

    @property
    def is_empty(self) -> bool:
        return self.start is None

    @property
    def span(self) -> "MonthSpan":
        return self

    def __len__(self):
        return 0 if self.is_empty else self.end - self.start + 1

    def __contains__(self, month: MonthStamp) -> bool:
        return not self.is_empty and self.start <= month <= self.end

    def __iter__(self):
        for i in range(len(self)):
            yield self.start + i

    def intersect(self, other: "MonthSpan") -> "MonthSpan":
        if self.is_empty or other.is_empty:
            return MonthSpan.empty()
        return MonthSpan(max(self.start, other.start), min(self.end, other.end))

    def __eq__(self, other):
        if not isinstance(other, MonthSpan):
            return NotImplemented
        return (self.start, self.end) == (other.start, other.end)

    def __hash__(self):
        return hash((self.start, self.end))

    def __repr__(self):
        if self.is_empty:
            return "MonthSpan(empty)"
        return f"MonthSpan({self.start}..{self.end})"


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 1:
        raise ValueError("series values must be one-dimensional")
    arr.flags.writeable = False
    return arr


def _contiguous(points: Sequence[tuple[MonthStamp, object]], what: str):
    months = [p[0] for p in points]
    for prev, cur in zip(months, months[1:]):
        if cur <= prev:
            raise DataError(f"{what}: months not strictly increasing at {cur}")
        if cur - prev != 1:
            raise GapInSeries(f"{what}: gap between {prev} and {cur}")
    return months[0] if months else None


class _Monthly:
    """Shared month-indexing for gap-free series with ``start`` and ``values``."""

    start: MonthStamp
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    @property
    def end(self) -> MonthStamp:
        return self.start + (len(self.values) - 1)

    @property
    def span(self) -> MonthSpan:
        if len(self.values) == 0:
            return MonthSpan.empty()
        return MonthSpan(self.start, self.end)

    @property
    def months(self) -> list[MonthStamp]:
        return [self.start + i for i in range(len(self.values))]

    def offset(self, month: MonthStamp) -> int:
        """Array offset of ``month``; raises KeyError when outside the span."""
        i = month - self.start
        if not 0 <= i < len(self.values):
            raise KeyError(month)
        return i

    def covers(self, span: MonthSpan) -> bool:
        return span.is_empty or (span.start in self.span and span.end in self.span)

    def value_at(self, month: MonthStamp) -> float:
        return float(self.values[self.offset(month)])

    def points(self) -> list[tuple[MonthStamp, float]]:
        return [(self.start + i, float(v)) for i, v in enumerate(self.values)]


@dataclass(frozen=True, eq=False)
class ReturnSeries(_Monthly):
    """Monthly log returns of one asset (or a group acting as one asset)."""

    asset: str
    start: MonthStamp
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if not np.all(np.isfinite(arr)):
            raise DataError(f"{self.asset}: non-finite return")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_points(cls, asset: str, points: Sequence[tuple[MonthStamp, float]]):
        start = _contiguous(points, asset)
        if start is None:
            raise InsufficientHistory(f"{asset}: empty series")
        return cls(asset, start, [p[1] for p in points])

    def slice(self, span: MonthSpan) -> "ReturnSeries":
        if span.is_empty:
            raise InsufficientHistory(f"{self.asset}: empty span")
        i, j = self.offset(span.start), self.offset(span.end)
        return ReturnSeries(self.asset, span.start, self.values[i : j + 1])

    def __eq__(self, other):
        if not isinstance(other, ReturnSeries):
            return NotImplemented
        return (
            self.asset == other.asset
            and self.start == other.start
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RiskFreeSeries(_Monthly):
    """Monthly risk-free rate, already in log-return convention."""

    start: MonthStamp
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if not np.all(np.isfinite(arr)):
            raise DataError("risk-free: non-finite rate")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_points(cls, points: Sequence[tuple[MonthStamp, float]]):
        start = _contiguous(points, "risk-free")
        if start is None:
            raise InsufficientHistory("risk-free: empty series")
        return cls(start, [p[1] for p in points])

    @classmethod
    def zeros(cls, span: MonthSpan) -> "RiskFreeSeries":
        return cls(span.start, np.zeros(len(span)))

    @classmethod
    def constant(cls, span: MonthSpan, rate: float) -> "RiskFreeSeries":
        return cls(span.start, np.full(len(span), float(rate)))

    def __neg__(self):
        return RiskFreeSeries(self.start, -self.values)

    def __eq__(self, other):
        if not isinstance(other, RiskFreeSeries):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.values, other.values)

    __hash__ = None


def annual_percent_to_monthly(rate_annual_pct: float) -> float:
    """Convert an annualized percentage quote to a monthly log rate."""
    return math.log1p(rate_annual_pct / 100.0) / 12.0


@dataclass(frozen=True, eq=False)
class PriceSeries(_Monthly):
    asset: str
    start: MonthStamp
    close: np.ndarray
    adj_close: np.ndarray

    def __post_init__(self):
        close = _frozen_array(self.close)
        adj = _frozen_array(self.adj_close)
        if close.shape != adj.shape:
            raise ValueError("close and adj_close lengths differ")
        for name, arr in (("close", close), ("adj_close", adj)):
            bad = ~(np.isfinite(arr) & (arr > 0))
            if bad.any():
                i = int(np.argmax(bad))
                raise NonPositivePrice(
                    f"{self.asset}: {name} {arr[i]!r} at {self.start + i} is not positive"
                )
        object.__setattr__(self, "close", close)
        object.__setattr__(self, "adj_close", adj)

    @property
    def values(self):
        return self.close

    @classmethod
    def from_points(cls, asset: str, points: Sequence[tuple[MonthStamp, float, float]]):
        start = _contiguous(points, asset)
        if start is None:
            raise InsufficientHistory(f"{asset}: empty series")
        return cls(asset, start, [p[1] for p in points], [p[2] for p in points])

    def __eq__(self, other):
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return (
            self.asset == other.asset
            and self.start == other.start
            and np.array_equal(self.close, other.close)
            and np.array_equal(self.adj_close, other.adj_close)
        )

    __hash__ = None


class Factor(enum.Enum):
    ClosingPrice = "ClosingPrice"
    AdjustedPrice = "AdjustedPrice"
    MarketValueOutstanding = "MarketValueOutstanding"
    MarketValueAll = "MarketValueAll"
    TurnoverRate = "TurnoverRate"
    TradingVolume = "TradingVolume"

    @property
    def strictly_positive(self) -> bool:
        # turnover can legitimately be zero for a suspended stock
        return self is not Factor.TurnoverRate


@dataclass(frozen=True, eq=False)
class FactorPanel:
    """One firm characteristic observed over (asset, month) cells."""

    factor: Factor
    cells: Mapping[tuple[str, MonthStamp], float]
    _by_asset: dict = field(init=False, repr=False)

    def __post_init__(self):
        by_asset: dict[str, tuple[list[int], list[float]]] = {}
        for (asset, month), value in sorted(
            self.cells.items(), key=lambda kv: (kv[0][0], kv[0][1].index)
        ):
            value = float(value)
            if not math.isfinite(value):
                raise DataError(f"{self.factor.value}: non-finite value for {asset} {month}")
            if self.factor.strictly_positive and value <= 0:
                raise DataError(f"{self.factor.value}: non-positive value for {asset} {month}")
            if value < 0:
                raise DataError(f"{self.factor.value}: negative value for {asset} {month}")
            idx, vals = by_asset.setdefault(asset, ([], []))
            idx.append(month.index)
            vals.append(value)
        object.__setattr__(self, "cells", dict(self.cells))
        object.__setattr__(self, "_by_asset", by_asset)

    @property
    def assets(self) -> list[str]:
        return sorted(self._by_asset)

    def latest(self, asset: str, month: MonthStamp) -> float | None:
        """Most recent value observed at or before ``month``."""
        entry = self._by_asset.get(asset)
        if entry is None:
            return None
        idx, vals = entry
        i = bisect.bisect_right(idx, month.index)
        return vals[i - 1] if i else None

    def latest_values(self, month: MonthStamp) -> dict[str, float]:
        out = {}
        for asset in self.assets:
            v = self.latest(asset, month)
            if v is not None:
                out[asset] = v
        return out


class Sector(enum.Enum):
    Energy = "Energy"
    Materials = "Materials"
    Industry = "Industry"
    DiscretionaryConsumption = "Discretionary Consumption"
    EssentialConsumption = "Essential Consumption"
    MedicalAndHealth = "Medical and Health"
    FinanceAndEstate = "Finance and Estate"
    Technology = "Technology"
    Telecommunications = "Telecommunications"
    PublicUtilities = "Public Utilities"

    @classmethod
    def lookup(cls, name: str) -> "Sector":
        key = " ".join(name.split()).casefold()
        for s in cls:
            if key in (s.value.casefold(), s.name.casefold()):
                return s
        raise KeyError(name)


@dataclass(frozen=True)
class SectorMap:
    entries: Mapping[str, Sector]

    def __post_init__(self):
        for asset, sector in self.entries.items():
            if not isinstance(sector, Sector):
                raise TypeError(f"{asset}: sector must be a Sector, got {sector!r}")
        object.__setattr__(self, "entries", dict(sorted(self.entries.items())))

    def members(self) -> dict[Sector, list[str]]:
        """Sector -> sorted member assets, in the fixed sector order."""
        out: dict[Sector, list[str]] = {}
        for s in Sector:
            names = [a for a, sec in self.entries.items() if sec is s]
            if names:
                out[s] = names
        return out


def log_returns(prices: PriceSeries, use_adjusted: bool = True) -> ReturnSeries:
    """Month-over-month log returns; the first price month has no return."""
    p = np.asarray(prices.adj_close if use_adjusted else prices.close, dtype=float)
    if len(p) < 2:
        raise InsufficientHistory(f"{prices.asset}: need at least 2 prices, got {len(p)}")
    if np.any(~(p > 0)):
        raise NonPositivePrice(f"{prices.asset}: non-positive price")
    return ReturnSeries(prices.asset, prices.start + 1, np.log(p[1:] / p[:-1]))


def excess_returns(returns: ReturnSeries, rf: RiskFreeSeries) -> ReturnSeries:
    if len(returns) == 0:
        return returns
    lo = returns.start - rf.start
    if lo < 0:
        raise MissingRiskFree(returns.start)
    hi = lo + len(returns)
    if hi > len(rf):
        raise MissingRiskFree(rf.end + 1)
    return ReturnSeries(returns.asset, returns.start, returns.values - rf.values[lo:hi])


def align(series: Iterable) -> MonthSpan:
    """Largest month interval covered by every input (series or spans)."""
    items = list(series)
    if not items:
        raise ValueError("align needs at least one series")
    span = items[0].span
    for s in items[1:]:
        span = span.intersect(s.span)
    return span
