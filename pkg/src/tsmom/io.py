"""File formats and table rendering.

Input files are UTF-8 CSV with a mandatory header row:

===========  ==============================
prices       ``asset,month,close,adj_close``
risk-free    ``month,rate_monthly``
factors      ``asset,month,factor,value``
sectors      ``asset,sector``
regression   ``group,J,K,ER``
===========  ==============================

Months are ``YYYY-MM``. Floats are written with ``repr`` so a write/read
cycle is lossless.
"""

from __future__ import annotations

import csv
import io
import math
import os
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping

import numpy as np

from .backtest import (
    Category,
    CellError,
    ClassificationSummary,
    GridResult,
    StrategyStats,
)
from .cross_section import QUINTILES, RegressionDataset
from .errors import (
    DataError,
    DuplicateRow,
    GapInSeries,
    ParseError,
    UnknownFactor,
    UnknownSector,
)
from .market_data import (
    Factor,
    FactorPanel,
    MonthStamp,
    PriceSeries,
    RiskFreeSeries,
    Sector,
    SectorMap,
    annual_percent_to_monthly,
)
from .stats import RegressionFit, SignificanceRule

PRICES_HEADER = ["asset", "month", "close", "adj_close"]
RISKFREE_HEADER = ["month", "rate_monthly"]
FACTORS_HEADER = ["asset", "month", "factor", "value"]
SECTORS_HEADER = ["asset", "sector"]
DATASET_HEADER = ["group", "J", "K", "ER"]


def _rows(path, header: list[str]):
    """Yield (line_number, fields) after checking the header."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError("empty file, header row required", path, 1) from None
        got = [h.strip() for h in first]
        if got != header:
            raise ParseError(f"expected header {','.join(header)}, got {','.join(got)}", path, 1)
        for fields in reader:
            line = reader.line_num
            if not fields or all(not f.strip() for f in fields):
                continue
            if len(fields) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(fields)}", path, line)
            yield line, [f.strip() for f in fields]


def _month(text, path, line) -> MonthStamp:
    try:
        return MonthStamp.parse(text)
    except ValueError as exc:
        raise ParseError(str(exc), path, line) from None


def _float(text, path, line, what) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{what}: not a number: {text!r}", path, line) from None
    if not math.isfinite(v):
        raise ParseError(f"{what}: non-finite value {text!r}", path, line)
    return v


def _contiguous_or_raise(asset, months_lines, path):
    months_lines.sort(key=lambda ml: ml[0].index)
    for (prev, _), (cur, line) in zip(months_lines, months_lines[1:]):
        if cur == prev:
            raise DuplicateRow(f"{path}:{line}: duplicate row for {asset} {cur}")
        if cur - prev != 1:
            raise GapInSeries(f"{path}:{line}: {asset} jumps from {prev} to {cur}")


def load_prices(path) -> dict[str, PriceSeries]:
    by_asset: dict[str, list] = {}
    for line, (asset, month, close, adj) in _rows(path, PRICES_HEADER):
        m = _month(month, path, line)
        c = _float(close, path, line, "close")
        a = _float(adj, path, line, "adj_close")
        by_asset.setdefault(asset, []).append((m, line, c, a))
    out = {}
    for asset in sorted(by_asset):
        rows = by_asset[asset]
        _contiguous_or_raise(asset, [(r[0], r[1]) for r in rows], path)
        rows.sort(key=lambda r: r[0].index)
        try:
            out[asset] = PriceSeries.from_points(asset, [(r[0], r[2], r[3]) for r in rows])
        except DataError as exc:
            raise type(exc)(f"{path}: {exc}") from None
    return out


def load_riskfree(path, annual_percent: bool = False) -> RiskFreeSeries:
    """Read monthly rates; with ``annual_percent`` the column holds annualized
    percentages and is converted to monthly log rates."""
    rows = []
    for line, (month, rate) in _rows(path, RISKFREE_HEADER):
        v = _float(rate, path, line, "rate_monthly")
        if annual_percent:
            v = annual_percent_to_monthly(v)
        rows.append((_month(month, path, line), line, v))
    if not rows:
        raise ParseError("no data rows", path)
    _contiguous_or_raise("risk-free", [(r[0], r[1]) for r in rows], path)
    rows.sort(key=lambda r: r[0].index)
    return RiskFreeSeries.from_points([(r[0], r[2]) for r in rows])


def load_factors(path) -> dict[Factor, FactorPanel]:
    cells: dict[Factor, dict] = {}
    for line, (asset, month, factor, value) in _rows(path, FACTORS_HEADER):
        try:
            f = Factor(factor)
        except ValueError:
            raise UnknownFactor(f"unknown factor {factor!r}", path, line) from None
        key = (asset, _month(month, path, line))
        panel = cells.setdefault(f, {})
        if key in panel:
            raise DuplicateRow(f"{path}:{line}: duplicate {f.value} for {asset} {key[1]}")
        panel[key] = _float(value, path, line, "value")
    out = {}
    for f in Factor:
        if f in cells:
            try:
                out[f] = FactorPanel(f, cells[f])
            except DataError as exc:
                raise type(exc)(f"{path}: {exc}") from None
    return out


def load_sectors(path) -> SectorMap:
    entries = {}
    for line, (asset, sector) in _rows(path, SECTORS_HEADER):
        try:
            s = Sector.lookup(sector)
        except KeyError:
            raise UnknownSector(f"unknown sector {sector!r}", path, line) from None
        if asset in entries:
            raise DuplicateRow(f"{path}:{line}: duplicate sector row for {asset}")
        entries[asset] = s
    return SectorMap(entries)


def load_regression_dataset(path) -> RegressionDataset:
    er, Js, Ks, groups = [], [], [], []
    for line, (g, J, K, value) in _rows(path, DATASET_HEADER):
        if g not in QUINTILES:
            raise ParseError(f"group must be one of {', '.join(QUINTILES)}, got {g!r}", path, line)
        groups.append(g)
        Js.append(_float(J, path, line, "J"))
        Ks.append(_float(K, path, line, "K"))
        er.append(_float(value, path, line, "ER"))
    return RegressionDataset(np.array(er), np.array(Js), np.array(Ks), tuple(groups))


def _writer(dest):
    """Open ``dest`` (path or text stream) for csv writing."""
    if isinstance(dest, (str, os.PathLike)):
        return open(dest, "w", newline="", encoding="utf-8"), True
    return dest, False


def _write_csv(dest, header, rows):
    fh, owned = _writer(dest)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if owned:
            fh.close()


def write_prices(prices: Iterable[PriceSeries], dest) -> None:
    rows = []
    for p in prices:
        for i in range(len(p)):
            rows.append([p.asset, str(p.start + i), repr(float(p.close[i])), repr(float(p.adj_close[i]))])
    _write_csv(dest, PRICES_HEADER, rows)


def write_riskfree(rf: RiskFreeSeries, dest) -> None:
    _write_csv(dest, RISKFREE_HEADER, [[str(m), repr(v)] for m, v in rf.points()])


def write_factors(panels: Iterable[FactorPanel], dest) -> None:
    rows = []
    for panel in panels:
        for (asset, month), v in sorted(panel.cells.items(), key=lambda kv: (kv[0][0], kv[0][1].index)):
            rows.append([asset, str(month), panel.factor.value, repr(float(v))])
    _write_csv(dest, FACTORS_HEADER, rows)


def write_sectors(sectors: SectorMap, dest) -> None:
    _write_csv(dest, SECTORS_HEADER, [[a, s.value] for a, s in sectors.entries.items()])


def write_regression_dataset(ds: RegressionDataset, dest) -> None:
    rows = [[g, str(int(J)), str(int(K)), repr(float(er))] for er, J, K, g in zip(ds.er, ds.J, ds.K, ds.group)]
    _write_csv(dest, DATASET_HEADER, rows)


# ---------------------------------------------------------------- rendering


def round_half_away(x: float, places: int = 2) -> str:
    """Decimal rendering with ties rounded away from zero.

    Rounds the shortest decimal repr of ``x``, so 0.125 becomes 0.13 even
    though the binary double is slightly below it. Negative values that
    round to zero keep their sign ("-0.00").
    """
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def format_cell(cell: StrategyStats | CellError) -> str:
    if isinstance(cell, CellError):
        return "--"
    return round_half_away(cell.annualized_er) + cell.significance.value


_CELL_W = 8


def _text_block(grid: GridResult) -> list[str]:
    spec = grid.spec
    head = f"{'J':>4}" + "".join(
        f"{('K=' if i == 0 else '') + str(K):>{_CELL_W}}" for i, K in enumerate(spec.holdings)
    )
    lines = [head]
    for J in spec.lookbacks:
        lines.append(f"{J:>4}" + "".join(f"{format_cell(grid[(J, K)]):>{_CELL_W}}" for K in spec.holdings))
    return lines


def _describe(grid: GridResult) -> str:
    spec = grid.spec
    parts = [f"method={spec.method}", f"lag={spec.lag_policy}"]
    if spec.hl_uses_excess:
        parts.append("hl_input=excess")
    if grid.label:
        parts.insert(0, grid.label)
    return "# " + "  ".join(parts)


def _csv_rows(grid: GridResult, extra: tuple = ()):
    spec = grid.spec
    for J, K in spec.cells():
        c = grid[(J, K)]
        base = [*extra, grid.label, str(spec.method), str(spec.lag_policy), J, K, format_cell(c)]
        stats = c.stats if isinstance(c, CellError) else c
        err = c.kind if isinstance(c, CellError) else ""
        if stats is None:
            yield base + ["", "", "", "", "", "", err]
        else:
            yield base + [
                repr(stats.annualized_er),
                repr(stats.mean_monthly),
                "" if math.isnan(stats.t_stat) else repr(stats.t_stat),
                stats.n_months,
                stats.lag,
                stats.significance.name,
                err,
            ]


GRID_CSV_HEADER = [
    "label", "method", "lag_policy", "J", "K", "display", "annualized_er",
    "mean_monthly", "t_stat", "n_months", "lag", "significance", "error",
]


def emit_grid_table(grid: GridResult, fmt: str = "text") -> str:
    """Render one grid: rows are look-backs J, columns holdings K."""
    if fmt == "csv":
        buf = io.StringIO()
        _write_csv(buf, GRID_CSV_HEADER, _csv_rows(grid))
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    return "\n".join([_describe(grid), *_text_block(grid)]) + "\n"


def emit_grid_tables(grids: Mapping[str, GridResult], fmt: str = "text") -> str:
    """Several grids; in text mode they are placed side by side (one block per
    grid, sharing the J column), as the HL/MOP pairs are laid out."""
    items = list(grids.items())
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(GRID_CSV_HEADER)
        for _, g in items:
            w.writerows(_csv_rows(g))
        return buf.getvalue()
    blocks = [_text_block(g) for _, g in items]
    width = len(blocks[0][0]) - 4
    titles = f"{'':>4}" + "".join(f"  {name:<{width - 2}}" for name, _ in items)
    lines = [titles.rstrip()]
    for i in range(len(blocks[0])):
        lines.append(blocks[0][i] + "".join(b[i][4:] for b in blocks[1:]))
    notes = [_describe(g) for _, g in items]
    return "\n".join(notes + lines) + "\n"


def emit_group_table(grids: Mapping[str, GridResult], fmt: str = "text") -> str:
    """Per-group grids stacked by J with one sub-row per group."""
    items = list(grids.items())
    if fmt == "csv":
        return emit_grid_tables(grids, "csv")
    spec = items[0][1].spec
    head = f"{'J':>4}  {'Group':<6}" + "".join(
        f"{('K=' if i == 0 else '') + str(K):>{_CELL_W}}" for i, K in enumerate(spec.holdings)
    )
    lines = [f"# method={spec.method}  lag={spec.lag_policy}", head]
    for J in spec.lookbacks:
        for n, (label, g) in enumerate(items):
            j = f"{J:>4}" if n == 0 else " " * 4
            lines.append(f"{j}  {label:<6}" + "".join(f"{format_cell(g[(J, K)]):>{_CELL_W}}" for K in spec.holdings))
    return "\n".join(lines) + "\n"


def emit_classification(summaries: Mapping[str, ClassificationSummary], fmt: str = "text") -> str:
    cats = list(Category)
    if fmt == "csv":
        buf = io.StringIO()
        rows = []
        for label, s in summaries.items():
            p = s.proportions
            rows.append([label, s.level, s.n_valid] + [repr(p[c]) for c in cats])
        _write_csv(buf, ["label", "level", "n_valid"] + [c.value for c in cats], rows)
        return buf.getvalue()
    name_w = max([len("group")] + [len(k) for k in summaries])
    lines = [f"{'group':<{name_w}}" + "".join(f"{c.value:>10}" for c in cats) + f"{'n':>6}"]
    for label, s in summaries.items():
        p = s.proportions
        lines.append(
            f"{label:<{name_w}}"
            + "".join(f"{round_half_away(p[c], 4):>10}" for c in cats)
            + f"{s.n_valid:>6}"
        )
    return "\n".join(lines) + "\n"


def emit_regression(
    fits: Mapping[str, RegressionFit], fmt: str = "text", rule: SignificanceRule = SignificanceRule()
) -> str:
    """Coefficients with parenthesized t-statistics and stars, one row per fit."""
    items = list(fits.items())
    names = items[0][1].names
    if fmt == "csv":
        buf = io.StringIO()
        rows = []
        for label, f in items:
            for n, c, t in zip(f.names, f.coef, f.t_stats):
                rows.append([label, n, repr(float(c)), repr(float(t)), f.n_obs, repr(f.r_squared)])
        _write_csv(buf, ["label", "term", "coef", "t_stat", "n_obs", "r_squared"], rows)
        return buf.getvalue()
    cells = []
    for label, f in items:
        row = [label]
        for c, t in zip(f.coef, f.t_stats):
            tt = "nan" if not math.isfinite(t) else round_half_away(t, 2)
            row.append(f"{round_half_away(c, 4)} ({tt}){rule.classify(t).value}")
        row.append(round_half_away(f.r_squared, 4))
        cells.append(row)
    header = ["", *names, "R2"]
    widths = [max(len(str(r[i])) for r in [header] + cells) for i in range(len(header))]
    out = ["  ".join(f"{h:>{w}}" for h, w in zip(header, widths))]
    for r in cells:
        out.append("  ".join(f"{v:>{w}}" for v, w in zip(r, widths)))
    return "\n".join(out) + "\n"
