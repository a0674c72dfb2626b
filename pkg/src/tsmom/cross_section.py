"""Characteristic quintiles, industry sectors, group return series, the
dummy-variable regression dataset and the two sector backtest protocols.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .backtest import (
    CellError,
    GridResult,
    GridSpec,
    _as_cell,
    _parallel_map,
    run_grid,
    stream_stats,
    strategy_stream,
)
from .errors import (
    EmptyGroupMonth,
    EmptySector,
    InsufficientHistory,
    MissingGroup,
    SpecMismatch,
    TooFewAssets,
)
from .market_data import (
    FactorPanel,
    MonthSpan,
    MonthStamp,
    ReturnSeries,
    RiskFreeSeries,
    Sector,
    SectorMap,
    align,
)
from .stats import RegressionFit, ols_fit

QUINTILES = ("G1", "G2", "G3", "G4", "G5")


@dataclass(frozen=True)
class GroupAssignment:
    """month -> asset -> group label, plus the ordered label set."""

    scheme: str
    labels: tuple[str, ...]
    memberships: Mapping[MonthStamp, Mapping[str, str]]


def form_quintiles(panel: FactorPanel, month: MonthStamp) -> dict[str, str]:
    """Sort assets by their latest factor value at or before ``month``.

    G1 holds the highest values. Block sizes differ by at most one, with the
    larger blocks first; ties go to the smaller asset identifier.
    """
    values = panel.latest_values(month)
    if len(values) < len(QUINTILES):
        raise TooFewAssets(f"{len(values)} assets with {panel.factor.value} data at {month}")
    ranked = sorted(values, key=lambda a: (-values[a], a))
    base, extra = divmod(len(ranked), len(QUINTILES))
    out: dict[str, str] = {}
    pos = 0
    for g, label in enumerate(QUINTILES):
        size = base + (1 if g < extra else 0)
        for asset in ranked[pos : pos + size]:
            out[asset] = label
        pos += size
    return out


def quintile_assignment(
    panel: FactorPanel, months: Iterable[MonthStamp], formation_lag: int = 1
) -> GroupAssignment:
    """Quintile membership for each month, formed from factor values known at
    the start of the month (i.e. at or before ``month - formation_lag``).

    Months with fewer than five eligible assets get no membership.
    """
    memberships = {}
    for m in months:
        try:
            memberships[m] = form_quintiles(panel, m - formation_lag)
        except TooFewAssets:
            continue
    return GroupAssignment(f"quintiles:{panel.factor.value}", QUINTILES, memberships)


def sector_assignment(sectors: SectorMap, months: Iterable[MonthStamp]) -> GroupAssignment:
    labels = tuple(s.value for s in sectors.members())
    fixed = {a: s.value for a, s in sectors.entries.items()}
    return GroupAssignment("sectors", labels, {m: fixed for m in months})


def _by_asset(returns) -> dict[str, ReturnSeries]:
    if isinstance(returns, Mapping):
        return dict(returns)
    return {r.asset: r for r in returns}


def returns_span(returns) -> MonthSpan:
    """Union span of a collection of return series."""
    series = list(_by_asset(returns).values())
    if not series:
        return MonthSpan.empty()
    return MonthSpan(min(r.start for r in series), max(r.end for r in series))


def group_returns(
    assignment: GroupAssignment, returns
) -> dict[str, ReturnSeries]:
    """Equal-weighted mean of member log returns for each group and month.

    Members without a return in a month are left out of that month's mean.
    Leading and trailing months without data shrink the group's span; an
    interior empty month raises :class:`EmptyGroupMonth`.
    """
    series = _by_asset(returns)
    months = sorted(assignment.memberships)
    if not months:
        return {}
    first, last = months[0], months[-1]
    n = last - first + 1
    members_at: dict[int, dict[str, list[str]]] = {}
    for m in months:
        groups: dict[str, list[str]] = {}
        for asset, g in assignment.memberships[m].items():
            groups.setdefault(g, []).append(asset)
        members_at[m - first] = groups

    out = {}
    for g in assignment.labels:
        vals = np.full(n, np.nan)
        for i, groups in members_at.items():
            month = first + i
            xs = []
            for asset in sorted(groups.get(g, ())):
                r = series.get(asset)
                if r is None:
                    continue
                k = month - r.start
                if 0 <= k < len(r):
                    xs.append(r.values[k])
            if xs:
                vals[i] = np.mean(xs)
        have = np.flatnonzero(~np.isnan(vals))
        if len(have) == 0:
            continue
        lo, hi = have[0], have[-1]
        inner = np.isnan(vals[lo : hi + 1])
        if inner.any():
            raise EmptyGroupMonth(g, first + int(lo + np.argmax(inner)))
        out[g] = ReturnSeries(g, first + int(lo), vals[lo : hi + 1])
    return out


@dataclass(frozen=True)
class GroupGridSet:
    scheme: str
    grids: Mapping[str, GridResult]

    def __post_init__(self):
        specs = {g.spec for g in self.grids.values()}
        if len(specs) > 1:
            raise SpecMismatch("group grids do not share one GridSpec")

    @property
    def spec(self) -> GridSpec:
        return next(iter(self.grids.values())).spec


def group_grids(
    assignment: GroupAssignment,
    returns,
    rf: RiskFreeSeries | None,
    spec: GridSpec,
    workers: int = 1,
) -> GroupGridSet:
    series = group_returns(assignment, returns)
    grids = {}
    for g in assignment.labels:
        if g not in series:
            continue
        r = series[g]
        if rf is not None:
            r = r.slice(align([r, rf]))
        grids[g] = run_grid(r, rf, spec, workers=workers, label=g)
    return GroupGridSet(assignment.scheme, grids)


@dataclass(frozen=True)
class RegressionDataset:
    """Rows (ER, J, K, group); ER is the annualized mean excess return."""

    er: np.ndarray
    J: np.ndarray
    K: np.ndarray
    group: tuple[str, ...]
    dropped: tuple[tuple[str, int, int], ...] = ()

    def __len__(self):
        return len(self.er)

    def design(self) -> np.ndarray:
        """Columns: intercept, J, K, D_2 .. D_5 (G1 is the base level)."""
        X = np.zeros((len(self.er), 7))
        X[:, 0] = 1.0
        X[:, 1] = self.J
        X[:, 2] = self.K
        for i, g in enumerate(self.group):
            k = QUINTILES.index(g)
            if k > 0:
                X[i, 2 + k] = 1.0
        return X

    def fit(self) -> RegressionFit:
        return ols_fit(self.design(), self.er)


def build_regression_dataset(grids: GroupGridSet | Mapping[str, GridResult]) -> RegressionDataset:
    """One row per (group, J, K) cell with a defined mean.

    Cells that failed before a mean existed (e.g. too little history) are
    listed in ``dropped``; zero-variance cells keep their mean.
    """
    if not isinstance(grids, GroupGridSet):
        grids = GroupGridSet("quintiles", dict(grids))
    missing = [g for g in QUINTILES if g not in grids.grids]
    if missing:
        raise MissingGroup(f"missing groups: {', '.join(missing)}")
    er, Js, Ks, labels, dropped = [], [], [], [], []
    spec = grids.spec
    for g in QUINTILES:
        grid = grids.grids[g]
        for J, K in spec.cells():
            c = grid[(J, K)]
            stats = c.stats if isinstance(c, CellError) else c
            if stats is None:
                dropped.append((g, J, K))
                continue
            er.append(stats.annualized_er)
            Js.append(J)
            Ks.append(K)
            labels.append(g)
    return RegressionDataset(
        np.array(er, dtype=float),
        np.array(Js, dtype=float),
        np.array(Ks, dtype=float),
        tuple(labels),
        tuple(dropped),
    )


def _sector_members(sectors: SectorMap, series: Mapping[str, ReturnSeries]) -> dict[Sector, list[str]]:
    out = {}
    for sector, names in sectors.members().items():
        have = [a for a in names if a in series and len(series[a]) > 0]
        if not have:
            raise EmptySector(f"sector {sector.value} has no member with return data")
        out[sector] = have
    return out


def sector_index_grid(
    sectors: SectorMap,
    returns,
    rf: RiskFreeSeries | None,
    spec: GridSpec,
    workers: int = 1,
) -> dict[str, GridResult]:
    """Trade each sector as one equal-weighted index on a shared signal."""
    series = _by_asset(returns)
    members = _sector_members(sectors, series)
    span = returns_span([series[a] for names in members.values() for a in names])
    assignment = sector_assignment(
        SectorMap({a: s for s, names in members.items() for a in names}), span
    )
    index = group_returns(assignment, series)
    out = {}
    for sector in members:
        r = index[sector.value]
        if rf is not None:
            r = r.slice(align([r, rf]))
        out[sector.value] = run_grid(r, rf, spec, workers=workers, label=sector.value)
    return out


def _averaged_stream(streams: list[ReturnSeries], label: str) -> ReturnSeries:
    """Month-by-month mean over the member streams valid in that month."""
    first = min(s.start for s in streams)
    last = max(s.end for s in streams)
    n = last - first + 1
    total = np.zeros(n)
    count = np.zeros(n, dtype=int)
    for s in streams:
        o = s.start - first
        total[o : o + len(s)] += s.values
        count[o : o + len(s)] += 1
    if (count == 0).any():
        raise EmptyGroupMonth(label, first + int(np.argmax(count == 0)))
    return ReturnSeries(label, first, total / count)


def sector_within_grid(
    sectors: SectorMap,
    returns,
    rf: RiskFreeSeries | None,
    spec: GridSpec,
    workers: int = 1,
) -> dict[str, GridResult]:
    """Trade each member on its own signal, average the member strategy
    returns month by month, then test the averaged stream."""
    series = _by_asset(returns)
    members = _sector_members(sectors, series)

    def member_series(a):
        r = series[a]
        if rf is not None:
            r = r.slice(align([r, rf]))
        return r

    out = {}
    for sector, names in members.items():
        inputs = []
        for a in names:
            try:
                inputs.append(member_series(a))
            except InsufficientHistory:
                continue

        def cell(jk, inputs=inputs, label=sector.value):
            J, K = jk

            def compute():
                streams = []
                for r in inputs:
                    try:
                        streams.append(strategy_stream(r, rf, J, K, spec.method, spec.hl_uses_excess))
                    except InsufficientHistory:
                        continue
                if not streams:
                    raise InsufficientHistory(f"{label}: no member supports J={J} K={K}")
                avg = _averaged_stream(streams, label)
                return stream_stats(avg.values, J, K, spec.lag_policy, spec.significance)

            return _as_cell(J, K, compute)

        keys = spec.cells()
        cells = dict(zip(keys, _parallel_map(cell, keys, workers)))
        out[sector.value] = GridResult(spec, cells, sector.value)
    return out
