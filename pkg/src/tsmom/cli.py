"""Command-line entry points.

Exit codes: 0 success, 1 data error, 2 usage error. Every option can also be
given in a ``key=value`` file passed with ``--config``; flags win.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io as tio
from .backtest import GridSpec, classify, run_grid
from .cross_section import (
    build_regression_dataset,
    group_grids,
    quintile_assignment,
    returns_span,
    sector_index_grid,
    sector_within_grid,
)
from .errors import DataError
from .market_data import (
    Factor,
    MonthStamp,
    RiskFreeSeries,
    align,
    log_returns,
)
from .signals import SignalMethod
from .stats import LagPolicy, SignificanceRule
from .synthetic import Ar1Spec, gen_ar1, prices_from_returns

METHODS = {"hl": (SignalMethod.HL,), "mop": (SignalMethod.MOP,), "both": (SignalMethod.HL, SignalMethod.MOP)}


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass(frozen=True)
class RunConfig:
    methods: tuple[SignalMethod, ...] = (SignalMethod.MOP,)
    lookbacks: tuple[int, ...] = GridSpec().lookbacks
    holdings: tuple[int, ...] = GridSpec().holdings
    lag_policy: LagPolicy = field(default_factory=LagPolicy.holding_linked)
    significance: SignificanceRule = field(default_factory=SignificanceRule)
    hl_uses_excess: bool = False
    fmt: str = "text"
    workers: int = 1
    out: Path | None = None

    def spec(self, method: SignalMethod) -> GridSpec:
        return GridSpec(
            self.lookbacks, self.holdings, method, self.lag_policy, self.significance, self.hl_uses_excess
        )


def _int_list(flag, text) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError:
        raise UsageError(flag, f"expected comma-separated integers, got {text!r}") from None
    return values


def build_config(args) -> RunConfig:
    lookbacks = _int_list("--lookbacks", args.lookbacks)
    holdings = _int_list("--holdings", args.holdings)
    for flag, vals in (("--lookbacks", lookbacks), ("--holdings", holdings)):
        try:
            GridSpec(vals, (1,)) if flag == "--lookbacks" else GridSpec((1,), vals)
        except ValueError as exc:
            raise UsageError(flag, str(exc)) from None
    try:
        lag = LagPolicy.parse(args.lag)
    except ValueError:
        raise UsageError("--lag", f"expected 'auto' or a non-negative integer, got {args.lag!r}") from None
    try:
        rule = SignificanceRule(args.crit5, args.crit1)
    except ValueError as exc:
        raise UsageError("--crit5/--crit1", str(exc)) from None
    if args.workers < 1:
        raise UsageError("--workers", "must be >= 1")
    return RunConfig(
        methods=METHODS[args.method],
        lookbacks=lookbacks,
        holdings=holdings,
        lag_policy=lag,
        significance=rule,
        hl_uses_excess=args.hl_excess,
        fmt=args.format,
        workers=args.workers,
        out=Path(args.out) if args.out else None,
    )


def _grid_options(p, stock_default: bool, prices_required: bool = True):
    p.add_argument("--prices", required=prices_required, help="prices CSV (asset,month,close,adj_close)")
    p.add_argument("--riskfree", help="risk-free CSV (month,rate_monthly); zero rate if omitted")
    p.add_argument("--rf-annual-pct", action="store_true", help="risk-free column holds annual percent")
    p.add_argument("--method", choices=sorted(METHODS), default="mop")
    p.add_argument("--lookbacks", default="1,3,6,9,12,24,36,48,60")
    p.add_argument("--holdings", default="1,3,6,9,12,24,36,48,60")
    p.add_argument("--lag", default="auto", help="Newey-West lag: 'auto' (K-1) or an integer")
    p.add_argument("--crit5", type=float, default=1.960)
    p.add_argument("--crit1", type=float, default=2.576)
    p.add_argument("--hl-excess", action="store_true", help="feed excess returns to HL")
    if stock_default:
        p.add_argument("--raw-close", action="store_true", help="use close instead of adj_close")
    else:
        p.add_argument("--adjusted", action="store_true", help="use adj_close instead of close")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--config", help="key=value file with defaults for these options")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsmom", description="Time-series momentum / contrarian research engine")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grid", help="J x K grid for each asset (index-level analysis)")
    _grid_options(g, stock_default=False)
    g.add_argument("--asset", action="append", help="restrict to this asset (repeatable)")

    q = sub.add_parser("groups", help="grids for characteristic quintile groups")
    _grid_options(q, stock_default=True)
    q.add_argument("--factors", required=True)
    q.add_argument("--factor", required=True, help="one of: " + ", ".join(f.value for f in Factor))

    r = sub.add_parser("regress", help="ER on J, K and group dummies")
    _grid_options(r, stock_default=True, prices_required=False)
    r.add_argument("--factors")
    r.add_argument("--factor")
    r.add_argument("--dataset", help="pre-built group,J,K,ER CSV; skips the backtests")

    s = sub.add_parser("sectors", help="grids for industry sectors")
    _grid_options(s, stock_default=True)
    s.add_argument("--sectors", required=True)
    s.add_argument("--mode", choices=("index", "within"), default="index")

    y = sub.add_parser("synth", help="write a synthetic AR(1) / random-walk price file")
    y.add_argument("--model", choices=("ar1", "rw"), default="ar1")
    y.add_argument("--phi", type=float, default=0.0)
    y.add_argument("--mu", type=float, default=0.0)
    y.add_argument("--sigma", type=float, default=0.05)
    y.add_argument("--T", type=int, default=600)
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--assets", type=int, default=1, help="number of assets (independent streams)")
    y.add_argument("--start", default="1991-01", help="first return month, YYYY-MM")
    y.add_argument("--p0", type=float, default=100.0)
    y.add_argument("--out", required=True)
    y.add_argument("--rf-out", help="also write a zero risk-free file covering the span")
    y.add_argument("--config")
    return parser


def read_config_file(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError("--config", f"{path}:{n}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _apply_config(parser, argv):
    """Parse ``argv`` after installing ``--config`` values as defaults, so a
    config file can also satisfy required options."""
    argv = list(sys.argv[1:] if argv is None else argv)
    path = _config_path(argv)
    command = next((a for a in argv if not a.startswith("-")), None)
    choices = parser._subparsers._group_actions[0].choices
    if path is None or command not in choices:
        return parser.parse_args(argv)
    try:
        cfg = read_config_file(path)
    except OSError as exc:
        raise UsageError("--config", str(exc)) from None
    subparser = choices[command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for k, v in cfg.items():
        if k not in actions or k in ("config", "help"):
            raise UsageError("--config", f"unknown key {k!r}")
        a = actions[k]
        if isinstance(a, argparse._StoreTrueAction):
            lv = v.lower()
            if lv not in _TRUE | _FALSE:
                raise UsageError("--config", f"{k}: expected a boolean, got {v!r}")
            defaults[k] = lv in _TRUE
        else:
            defaults[k] = v  # argparse applies the option's type to string defaults
        a.required = False
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _write(text: str, cfg_out):
    if cfg_out is None:
        sys.stdout.write(text)
    else:
        Path(cfg_out).write_text(text, encoding="utf-8")


def _load_riskfree(args):
    if not args.riskfree:
        return None
    return tio.load_riskfree(args.riskfree, annual_percent=args.rf_annual_pct)


def _returns(prices, use_adjusted, rf):
    out = {}
    for asset, p in prices.items():
        r = log_returns(p, use_adjusted)
        if rf is not None:
            span = align([r, rf])
            if span.is_empty:
                raise DataError(f"{asset}: no overlap with the risk-free series")
            r = r.slice(span)
        out[asset] = r
    return out


def _section(title, body):
    return f"== {title} ==\n{body}"


def cmd_grid(args, cfg: RunConfig) -> str:
    rf = _load_riskfree(args)
    prices = tio.load_prices(args.prices)
    if args.asset:
        unknown = [a for a in args.asset if a not in prices]
        if unknown:
            raise DataError(f"{args.prices}: no asset named {', '.join(unknown)}")
        prices = {a: prices[a] for a in args.asset}
    returns = _returns(prices, args.adjusted, rf)
    parts = []
    for asset, r in returns.items():
        grids = {str(m): run_grid(r, rf, cfg.spec(m), workers=cfg.workers) for m in cfg.methods}
        if cfg.fmt == "csv":
            parts.append(tio.emit_grid_tables(grids, "csv"))
        else:
            parts.append(_section(asset, tio.emit_grid_tables(grids, "text")))
    if cfg.fmt == "csv":
        # one header for the whole file
        return parts[0] + "".join(p.split("\n", 1)[1] for p in parts[1:])
    return "\n".join(parts)


def _factor(args) -> Factor:
    try:
        return Factor(args.factor)
    except ValueError:
        raise UsageError("--factor", f"unknown factor {args.factor!r}") from None


def _group_sets(args, cfg: RunConfig):
    factor = _factor(args)
    rf = _load_riskfree(args)
    prices = tio.load_prices(args.prices)
    panels = tio.load_factors(args.factors)
    if factor not in panels:
        raise DataError(f"{args.factors}: no rows for factor {factor.value}")
    returns = _returns(prices, not args.raw_close, rf)
    span = returns_span(returns)
    assignment = quintile_assignment(panels[factor], span)
    return {
        str(m): group_grids(assignment, returns, rf, cfg.spec(m), workers=cfg.workers)
        for m in cfg.methods
    }


def cmd_groups(args, cfg: RunConfig) -> str:
    sets = _group_sets(args, cfg)
    out = []
    for method, gs in sets.items():
        summary = {g: classify(grid) for g, grid in gs.grids.items()}
        out.append(_section(f"{args.factor} {method}", tio.emit_group_table(gs.grids, cfg.fmt)))
        out.append(_section(f"classification {method} (5%)", tio.emit_classification(summary, cfg.fmt)))
    return "\n".join(out)


def cmd_regress(args, cfg: RunConfig) -> str:
    if args.dataset:
        fits = {"dataset": tio.load_regression_dataset(args.dataset).fit()}
    else:
        for flag, v in (("--prices", args.prices), ("--factors", args.factors), ("--factor", args.factor)):
            if not v:
                raise UsageError(flag, "required unless --dataset is given")
        sets = _group_sets(args, cfg)
        fits = {m: build_regression_dataset(gs).fit() for m, gs in sets.items()}
    return tio.emit_regression(fits, cfg.fmt, cfg.significance)


def cmd_sectors(args, cfg: RunConfig) -> str:
    rf = _load_riskfree(args)
    prices = tio.load_prices(args.prices)
    sectors = tio.load_sectors(args.sectors)
    returns = _returns({a: p for a, p in prices.items() if a in sectors.entries}, not args.raw_close, rf)
    runner = sector_index_grid if args.mode == "index" else sector_within_grid
    out = []
    for m in cfg.methods:
        grids = runner(sectors, returns, rf, cfg.spec(m), workers=cfg.workers)
        for name, g in grids.items():
            out.append(_section(f"{name} {m} mode={args.mode}", tio.emit_grid_table(g, cfg.fmt)))
        summary = {name: classify(g) for name, g in grids.items()}
        out.append(_section(f"classification {m} mode={args.mode} (5%)", tio.emit_classification(summary, cfg.fmt)))
    return "\n".join(out)


def cmd_synth(args) -> None:
    try:
        start = MonthStamp.parse(args.start)
    except ValueError as exc:
        raise UsageError("--start", str(exc)) from None
    if args.model == "rw" and args.phi != 0.0:
        raise UsageError("--phi", "must be 0 for --model rw")
    if args.assets < 1:
        raise UsageError("--assets", "must be >= 1")
    try:
        spec = Ar1Spec(args.phi, args.mu, args.sigma, args.T, args.seed)
    except ValueError as exc:
        raise UsageError("--phi/--sigma/--T", str(exc)) from None
    width = len(str(args.assets - 1))
    series = []
    for i in range(args.assets):
        name = "SYN" if args.assets == 1 else f"SYN{i:0{width}d}"
        series.append(gen_ar1(spec, name, stream=i, start=start))
    tio.write_prices([prices_from_returns(r, args.p0) for r in series], args.out)
    if args.rf_out:
        span = series[0].span
        tio.write_riskfree(RiskFreeSeries.zeros(span), args.rf_out)


COMMANDS = {"grid": cmd_grid, "groups": cmd_groups, "regress": cmd_regress, "sectors": cmd_sectors}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = _apply_config(parser, argv)
        if args.command == "synth":
            cmd_synth(args)
            return 0
        cfg = build_config(args)
        _write(COMMANDS[args.command](args, cfg), cfg.out)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tsmom: error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"tsmom: data error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"tsmom: data error: {exc.filename}: file not found", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
